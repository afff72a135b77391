#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "leanctx/corpus.hpp"
#include "leanctx/embedder.hpp"
#include "leanctx/llm.hpp"
#include "leanctx/reducer.hpp"
#include "leanctx/self_information.hpp"

namespace leanctx {

enum class StateVariant {
    Subtract,
    Concat,
    Cosine,
};

StateVariant state_variant_from_name(const std::string& name);
std::string state_variant_name(StateVariant variant);

// Combines a context embedding and a query embedding into the vector the
// state clustering runs on.
std::vector<double> state_vector(std::span<const double> context_embedding,
                                 std::span<const double> query_embedding,
                                 StateVariant variant);

struct StateModel {
    StateVariant variant = StateVariant::Subtract;
    std::vector<std::vector<double>> centroids;

    bool fitted() const { return !centroids.empty(); }
};

struct StateFit {
    StateModel model;
    // Within-cluster sum of squares after each Lloyd iteration.
    std::vector<double> objective_history;
};

// Lloyd's k-means from deterministic farthest-point initialization. Stops
// when assignments stabilize or after max_iter iterations.
StateFit fit_states(const std::vector<std::vector<double>>& samples, int clusters,
                    std::uint64_t seed, StateVariant variant, int max_iter = 100);

// Index of the centroid closest (Euclidean) to state_vector(v_c, v_q); ties
// resolve to the lower index.
std::size_t get_state(const StateModel& model, std::span<const double> context_embedding,
                      std::span<const double> query_embedding);

// alpha * (2r - r*) - (1 - alpha) * tau
double compute_reward(double r, double r_star, double tau, double alpha);

// Running-mean value table: values[s][a] is the mean of all rewards seen at
// (s, a), counts[s][a] the number of updates.
struct QTable {
    QTable() = default;
    QTable(std::size_t states, std::size_t actions);

    void update(std::size_t state, std::size_t action, double reward);

    std::size_t states() const { return values.size(); }
    std::size_t actions() const { return values.empty() ? 0 : values[0].size(); }

    std::vector<std::vector<double>> values;
    std::vector<std::vector<long long>> counts;
};

struct RLAgent {
    StateModel states;
    std::vector<double> thresholds;
    QTable q;
    double alpha = 0.5;
    int embedder_dimension = 0;
    int clusters = 0; // target cluster count when the state model is not yet fitted

    // Greedy threshold for a state; ties resolve to the smallest threshold.
    double policy(std::size_t state) const;
    std::size_t policy_index(std::size_t state) const;
};

// Unfitted agent: the state model is fitted from the training set on the
// first train() call.
RLAgent make_agent(StateVariant variant, int clusters, std::vector<double> thresholds,
                   double alpha, int embedder_dimension);

struct TrainingSample {
    std::string query;
    std::string reference_answer;
    Context context;
};

struct TrainOptions {
    double reduction_rate = 0.8;
    std::uint64_t kmeans_seed = 0;
    // Score exploration answers against the full-context answer instead of
    // the reference answer.
    bool score_against_full_context_answer = false;
};

struct TrainReport {
    std::size_t samples = 0;
    std::size_t actions = 0;
    long long llm_calls = 0;
    std::vector<long long> state_visits;
    std::vector<double> kmeans_objective;
    bool completed = false;
    std::string error;
};

// Full-exploration training: every action is tried on every sample, the
// full-context answer is scored once per sample, and each outcome updates the
// Q table. A provider failure stops the sweep and leaves a partial report.
TrainReport train(RLAgent& agent, const std::vector<TrainingSample>& training_set,
                  CompletionProvider& llm, const Embedder& embedder,
                  const Tokenizer& tokenizer, const SelfInformationProvider& self_info,
                  const TrainOptions& options = {});

struct InferenceResult {
    std::string answer;
    ReducedContext reduced;
    std::size_t state = 0;
    double theta = 0.0;
    CompletionRecord completion;
};

InferenceResult infer(const RLAgent& agent, const std::string& query,
                      const Context& context, CompletionProvider& llm,
                      const Embedder& embedder, const Tokenizer& tokenizer,
                      const SelfInformationProvider& self_info, double reduction_rate);

void save_agent(const RLAgent& agent, const std::filesystem::path& path);
RLAgent load_agent(const std::filesystem::path& path);

} // namespace leanctx
