#include "leanctx/rl_agent.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>

#include <nlohmann/json.hpp>

#include "leanctx/errors.hpp"
#include "leanctx/rouge.hpp"
#include "leanctx/vecmath.hpp"

namespace leanctx {

StateVariant state_variant_from_name(const std::string& name) {
    if (name == "subtract") {
        return StateVariant::Subtract;
    }
    if (name == "concat") {
        return StateVariant::Concat;
    }
    if (name == "cosine") {
        return StateVariant::Cosine;
    }
    throw InvalidConfig("unknown state variant: " + name);
}

std::string state_variant_name(StateVariant variant) {
    switch (variant) {
    case StateVariant::Subtract:
        return "subtract";
    case StateVariant::Concat:
        return "concat";
    case StateVariant::Cosine:
        return "cosine";
    }
    throw InvalidConfig("unknown state variant");
}

std::vector<double> state_vector(std::span<const double> context_embedding,
                                 std::span<const double> query_embedding,
                                 StateVariant variant) {
    if (context_embedding.size() != query_embedding.size()) {
        throw DimensionMismatch("context and query embeddings differ in dimension");
    }
    switch (variant) {
    case StateVariant::Subtract: {
        std::vector<double> out(context_embedding.size());
        for (std::size_t i = 0; i < out.size(); ++i) {
            out[i] = context_embedding[i] - query_embedding[i];
        }
        return out;
    }
    case StateVariant::Concat: {
        std::vector<double> out;
        out.reserve(context_embedding.size() * 2);
        out.insert(out.end(), context_embedding.begin(), context_embedding.end());
        out.insert(out.end(), query_embedding.begin(), query_embedding.end());
        return out;
    }
    case StateVariant::Cosine:
        return {cosine_similarity(context_embedding, query_embedding)};
    }
    throw InvalidConfig("unknown state variant");
}

namespace {

std::size_t nearest_centroid(const std::vector<std::vector<double>>& centroids,
                             std::span<const double> point) {
    std::size_t best = 0;
    double best_distance = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < centroids.size(); ++c) {
        const double d = squared_distance(point, centroids[c]);
        if (d < best_distance) {
            best_distance = d;
            best = c;
        }
    }
    return best;
}

std::vector<std::vector<double>> farthest_point_init(
    const std::vector<std::vector<double>>& samples, std::size_t clusters,
    std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<std::vector<double>> centroids;
    centroids.push_back(samples[rng() % samples.size()]);

    std::vector<double> nearest(samples.size(), std::numeric_limits<double>::infinity());
    while (centroids.size() < clusters) {
        const std::vector<double>& latest = centroids.back();
        std::size_t farthest = 0;
        double farthest_distance = -1.0;
        for (std::size_t i = 0; i < samples.size(); ++i) {
            nearest[i] = std::min(nearest[i], squared_distance(samples[i], latest));
            if (nearest[i] > farthest_distance) {
                farthest_distance = nearest[i];
                farthest = i;
            }
        }
        centroids.push_back(samples[farthest]);
    }
    return centroids;
}

} // namespace

StateFit fit_states(const std::vector<std::vector<double>>& samples, int clusters,
                    std::uint64_t seed, StateVariant variant, int max_iter) {
    if (clusters <= 0) {
        throw InvalidConfig("cluster count must be positive");
    }
    if (samples.size() < static_cast<std::size_t>(clusters)) {
        throw InsufficientSamples("need at least " + std::to_string(clusters) +
                                  " samples, got " + std::to_string(samples.size()));
    }
    const std::size_t dim = samples[0].size();
    for (const auto& s : samples) {
        if (s.size() != dim) {
            throw DimensionMismatch("state vectors differ in dimension");
        }
    }

    StateFit fit;
    fit.model.variant = variant;
    fit.model.centroids =
        farthest_point_init(samples, static_cast<std::size_t>(clusters), seed);

    std::vector<std::size_t> assignment(samples.size(), 0);
    for (int iter = 0; iter < max_iter; ++iter) {
        bool changed = false;
        for (std::size_t i = 0; i < samples.size(); ++i) {
            const std::size_t c = nearest_centroid(fit.model.centroids, samples[i]);
            if (c != assignment[i]) {
                assignment[i] = c;
                changed = true;
            }
        }
        if (!changed && iter > 0) {
            break;
        }

        // Recompute means; a cluster that lost all points keeps its centroid.
        std::vector<std::vector<double>> sums(fit.model.centroids.size(),
                                              std::vector<double>(dim, 0.0));
        std::vector<std::size_t> sizes(fit.model.centroids.size(), 0);
        for (std::size_t i = 0; i < samples.size(); ++i) {
            ++sizes[assignment[i]];
            for (std::size_t d = 0; d < dim; ++d) {
                sums[assignment[i]][d] += samples[i][d];
            }
        }
        for (std::size_t c = 0; c < fit.model.centroids.size(); ++c) {
            if (sizes[c] == 0) {
                continue;
            }
            for (std::size_t d = 0; d < dim; ++d) {
                fit.model.centroids[c][d] = sums[c][d] / static_cast<double>(sizes[c]);
            }
        }

        double objective = 0.0;
        for (std::size_t i = 0; i < samples.size(); ++i) {
            objective += squared_distance(
                samples[i], fit.model.centroids[nearest_centroid(fit.model.centroids,
                                                                 samples[i])]);
        }
        fit.objective_history.push_back(objective);
    }
    return fit;
}

std::size_t get_state(const StateModel& model, std::span<const double> context_embedding,
                      std::span<const double> query_embedding) {
    if (!model.fitted()) {
        throw InvalidConfig("state model is not fitted");
    }
    const std::vector<double> point =
        state_vector(context_embedding, query_embedding, model.variant);
    if (point.size() != model.centroids[0].size()) {
        throw DimensionMismatch("state vector dimension " + std::to_string(point.size()) +
                                " does not match centroid dimension " +
                                std::to_string(model.centroids[0].size()));
    }
    return nearest_centroid(model.centroids, point);
}

double compute_reward(double r, double r_star, double tau, double alpha) {
    const auto in_unit = [](double x) { return x >= 0.0 && x <= 1.0; };
    if (!in_unit(r) || !in_unit(r_star) || !in_unit(tau) || !in_unit(alpha)) {
        throw InvalidReward("reward inputs must lie in [0, 1]");
    }
    return alpha * (2.0 * r - r_star) - (1.0 - alpha) * tau;
}

QTable::QTable(std::size_t states, std::size_t actions)
    : values(states, std::vector<double>(actions, 0.0)),
      counts(states, std::vector<long long>(actions, 0)) {}

void QTable::update(std::size_t state, std::size_t action, double reward) {
    if (state >= values.size() || action >= values[state].size()) {
        throw InvalidIndex("q-table update out of range");
    }
    long long& n = counts[state][action];
    ++n;
    values[state][action] += (reward - values[state][action]) / static_cast<double>(n);
}

std::size_t RLAgent::policy_index(std::size_t state) const {
    if (state >= q.states()) {
        throw InvalidIndex("state index out of range");
    }
    const std::vector<double>& row = q.values[state];
    std::size_t best = 0;
    for (std::size_t a = 1; a < row.size(); ++a) {
        if (row[a] > row[best]) {
            best = a;
        }
    }
    return best;
}

double RLAgent::policy(std::size_t state) const { return thresholds[policy_index(state)]; }

namespace {

void validate_thresholds(const std::vector<double>& thresholds) {
    if (thresholds.size() < 2) {
        throw InvalidConfig("action set needs at least two thresholds");
    }
    for (std::size_t i = 0; i < thresholds.size(); ++i) {
        if (thresholds[i] < 0.0 || thresholds[i] > 0.4) {
            throw InvalidConfig("thresholds must lie in [0, 0.4]");
        }
        if (i > 0 && thresholds[i] <= thresholds[i - 1]) {
            throw InvalidConfig("thresholds must be strictly increasing");
        }
    }
}

} // namespace

RLAgent make_agent(StateVariant variant, int clusters, std::vector<double> thresholds,
                   double alpha, int embedder_dimension) {
    validate_thresholds(thresholds);
    if (clusters <= 0) {
        throw InvalidConfig("cluster count must be positive");
    }
    if (alpha < 0.0 || alpha > 1.0) {
        throw InvalidConfig("alpha must lie in [0, 1]");
    }
    if (embedder_dimension <= 0) {
        throw InvalidConfig("embedder dimension must be positive");
    }

    RLAgent agent;
    agent.states.variant = variant;
    agent.thresholds = std::move(thresholds);
    agent.q = QTable(static_cast<std::size_t>(clusters), agent.thresholds.size());
    agent.alpha = alpha;
    agent.embedder_dimension = embedder_dimension;
    agent.clusters = clusters;
    return agent;
}

TrainReport train(RLAgent& agent, const std::vector<TrainingSample>& training_set,
                  CompletionProvider& llm, const Embedder& embedder,
                  const Tokenizer& tokenizer, const SelfInformationProvider& self_info,
                  const TrainOptions& options) {
    if (agent.thresholds.empty()) {
        throw InvalidConfig("agent has no actions");
    }
    if (training_set.empty()) {
        throw InvalidConfig("training set is empty");
    }

    TrainReport report;
    report.samples = training_set.size();
    report.actions = agent.thresholds.size();

    // Embeddings once per sample; also the state-model fitting set.
    std::vector<std::vector<double>> query_embeddings;
    std::vector<std::vector<double>> context_embeddings;
    query_embeddings.reserve(training_set.size());
    context_embeddings.reserve(training_set.size());
    for (const TrainingSample& sample : training_set) {
        query_embeddings.push_back(embedder.embed(sample.query));
        context_embeddings.push_back(embedder.embed(context_text(sample.context)));
    }

    if (!agent.states.fitted()) {
        std::vector<std::vector<double>> points;
        points.reserve(training_set.size());
        for (std::size_t i = 0; i < training_set.size(); ++i) {
            points.push_back(state_vector(context_embeddings[i], query_embeddings[i],
                                          agent.states.variant));
        }
        StateFit fit = fit_states(points, agent.clusters, options.kmeans_seed,
                                  agent.states.variant);
        agent.states = std::move(fit.model);
        report.kmeans_objective = std::move(fit.objective_history);
        agent.q = QTable(agent.states.centroids.size(), agent.thresholds.size());
    }
    report.state_visits.assign(agent.states.centroids.size(), 0);

    try {
        for (std::size_t i = 0; i < training_set.size(); ++i) {
            const TrainingSample& sample = training_set[i];
            const std::size_t state =
                get_state(agent.states, context_embeddings[i], query_embeddings[i]);
            ++report.state_visits[state];

            const std::string full_text = context_text(sample.context);
            const CompletionRecord full_record =
                llm.complete(render_prompt(PromptKind::Qa, full_text, sample.query));
            ++report.llm_calls;
            const double r_star =
                rouge_n(full_record.answer, sample.reference_answer, 1).f1;
            const std::string& r_reference = options.score_against_full_context_answer
                                                 ? full_record.answer
                                                 : sample.reference_answer;

            const std::vector<RankedSentence> ranked =
                rank_sentences(sample.context, query_embeddings[i], embedder);

            for (std::size_t a = 0; a < agent.thresholds.size(); ++a) {
                const std::vector<std::size_t> kept = select_top_k(
                    ranked, agent.thresholds[a], sample.context.sentences.size());
                const ReducedContext reduced = stitch(sample.context, kept,
                                                      options.reduction_rate, self_info,
                                                      tokenizer);
                const CompletionRecord record =
                    llm.complete(render_prompt(PromptKind::Qa, reduced.text, sample.query));
                ++report.llm_calls;
                const double r = rouge_n(record.answer, r_reference, 1).f1;
                const double reward = compute_reward(r, r_star, reduced.tau, agent.alpha);
                agent.q.update(state, a, reward);
            }
        }
    } catch (const ProviderError& e) {
        report.error = e.what();
        return report;
    }
    report.completed = true;
    return report;
}

InferenceResult infer(const RLAgent& agent, const std::string& query,
                      const Context& context, CompletionProvider& llm,
                      const Embedder& embedder, const Tokenizer& tokenizer,
                      const SelfInformationProvider& self_info, double reduction_rate) {
    if (!agent.states.fitted()) {
        throw InvalidConfig("agent is not trained");
    }
    const std::vector<double> v_q = embedder.embed(query);
    const std::vector<double> v_c = embedder.embed(context_text(context));

    InferenceResult result;
    result.state = get_state(agent.states, v_c, v_q);
    result.theta = agent.policy(result.state);

    const std::vector<RankedSentence> ranked = rank_sentences(context, v_q, embedder);
    const std::vector<std::size_t> kept =
        select_top_k(ranked, result.theta, context.sentences.size());
    result.reduced = stitch(context, kept, reduction_rate, self_info, tokenizer);

    result.completion =
        llm.complete(render_prompt(PromptKind::Qa, result.reduced.text, query));
    result.answer = result.completion.answer;
    return result;
}

void save_agent(const RLAgent& agent, const std::filesystem::path& path) {
    nlohmann::ordered_json doc;
    doc["variant"] = state_variant_name(agent.states.variant);
    doc["alpha"] = agent.alpha;
    doc["thresholds"] = agent.thresholds;
    doc["centroids"] = agent.states.centroids;
    doc["q_values"] = agent.q.values;
    doc["q_counts"] = agent.q.counts;
    doc["embedder_dimension"] = agent.embedder_dimension;

    std::ofstream out(path);
    if (!out) {
        throw Error("cannot open agent file for writing: " + path.string());
    }
    out << doc.dump(2) << "\n";
}

RLAgent load_agent(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error("cannot open agent file: " + path.string());
    }
    try {
        nlohmann::json doc;
        in >> doc;

        RLAgent agent;
        agent.states.variant =
            state_variant_from_name(doc.at("variant").get<std::string>());
        agent.alpha = doc.at("alpha").get<double>();
        agent.thresholds = doc.at("thresholds").get<std::vector<double>>();
        agent.states.centroids =
            doc.at("centroids").get<std::vector<std::vector<double>>>();
        agent.q.values = doc.at("q_values").get<std::vector<std::vector<double>>>();
        agent.q.counts = doc.at("q_counts").get<std::vector<std::vector<long long>>>();
        agent.embedder_dimension = doc.at("embedder_dimension").get<int>();
        agent.clusters = static_cast<int>(agent.states.centroids.size());

        if (agent.q.values.size() != agent.states.centroids.size() ||
            agent.q.counts.size() != agent.q.values.size()) {
            throw CorruptAgentFile("q-table shape does not match centroids");
        }
        for (std::size_t s = 0; s < agent.q.values.size(); ++s) {
            if (agent.q.values[s].size() != agent.thresholds.size() ||
                agent.q.counts[s].size() != agent.thresholds.size()) {
                throw CorruptAgentFile("q-table row width does not match thresholds");
            }
        }
        try {
            validate_thresholds(agent.thresholds);
        } catch (const InvalidConfig& e) {
            throw CorruptAgentFile(std::string("invalid action set in agent file: ") +
                                   e.what());
        }
        return agent;
    } catch (const nlohmann::json::exception& e) {
        throw CorruptAgentFile("malformed agent file " + path.string() + ": " + e.what());
    }
}

} // namespace leanctx
