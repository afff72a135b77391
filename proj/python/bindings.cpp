#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "leanctx/commands.hpp"
#include "leanctx/config.hpp"
#include "leanctx/corpus.hpp"
#include "leanctx/embedder.hpp"
#include "leanctx/errors.hpp"
#include "leanctx/eval.hpp"
#include "leanctx/llm.hpp"
#include "leanctx/reducer.hpp"
#include "leanctx/rl_agent.hpp"
#include "leanctx/rouge.hpp"
#include "leanctx/self_information.hpp"
#include "leanctx/tokenizer.hpp"

namespace py = pybind11;
using namespace leanctx;

namespace {

// Bundles the offline component stack so Python callers do not have to wire
// tokenizer/embedder/self-information plumbing by hand.
class Pipeline {
public:
    Pipeline(int dimension, int chunk_size, int chunk_overlap)
        : embedder_(dimension), store_(dimension, make_config(chunk_size, chunk_overlap)) {}

    void add_document(const std::string& doc_id, const std::string& text) {
        store_.ingest(Document{doc_id, text}, embedder_, tokenizer_);
        self_info_ = UnigramModel();
        for (const Chunk& chunk : store_.chunks()) {
            self_info_.add_text(chunk.text, tokenizer_);
        }
    }

    Context build(const std::string& query, int n_chunks) const {
        return build_context(store_, query, n_chunks, embedder_);
    }

    ReducedContext reduce(const Context& context, const std::string& query, double theta,
                          double rate) const {
        const std::vector<double> v_q = embedder_.embed(query);
        const auto ranked = rank_sentences(context, v_q, embedder_);
        const auto kept = select_top_k(ranked, theta, context.sentences.size());
        return stitch(context, kept, rate, self_info_, tokenizer_);
    }

    std::string ask(const std::string& query, double theta, double rate, int n_chunks) {
        const Context context = build(query, n_chunks);
        const ReducedContext reduced = reduce(context, query, theta, rate);
        return mock_.complete(render_prompt(PromptKind::Qa, reduced.text, query)).answer;
    }

    RLAgent train_agent(const std::vector<std::tuple<std::string, std::string>>& qa,
                        int clusters, std::vector<double> thresholds, double alpha,
                        double rate, int n_chunks, std::uint64_t seed) {
        std::vector<TrainingSample> samples;
        for (const auto& [question, reference] : qa) {
            TrainingSample sample;
            sample.query = question;
            sample.reference_answer = reference;
            sample.context = build(question, n_chunks);
            samples.push_back(std::move(sample));
        }
        RLAgent agent = make_agent(StateVariant::Subtract, clusters, std::move(thresholds),
                                   alpha, embedder_.dimension());
        TrainOptions options;
        options.reduction_rate = rate;
        options.kmeans_seed = seed;
        const TrainReport report =
            train(agent, samples, mock_, embedder_, tokenizer_, self_info_, options);
        if (!report.completed) {
            throw ProviderError("training aborted: " + report.error, false, 0);
        }
        return agent;
    }

    py::dict infer_with(const RLAgent& agent, const std::string& query, double rate,
                        int n_chunks) {
        const Context context = build(query, n_chunks);
        const InferenceResult result = infer(agent, query, context, mock_, embedder_,
                                             tokenizer_, self_info_, rate);
        py::dict out;
        out["answer"] = result.answer;
        out["theta"] = result.theta;
        out["state"] = result.state;
        out["tau"] = result.reduced.tau;
        out["original_tokens"] = result.reduced.original_tokens;
        out["reduced_tokens"] = result.reduced.reduced_tokens;
        out["text"] = result.reduced.text;
        return out;
    }

    const VectorStore& store() const { return store_; }

private:
    static StoreConfig make_config(int chunk_size, int chunk_overlap) {
        StoreConfig config;
        config.chunk_size = chunk_size;
        config.chunk_overlap = chunk_overlap;
        return config;
    }

    RuleTokenizer tokenizer_;
    HashEmbedder embedder_;
    VectorStore store_;
    UnigramModel self_info_;
    MockProvider mock_;
};

} // namespace

PYBIND11_MODULE(_leanctx, m) {
    m.doc() = "Query-aware context reduction for retrieval-augmented QA";

    py::register_exception<Error>(m, "LeanctxError");

    py::class_<Token>(m, "Token")
        .def_readonly("text", &Token::text)
        .def_readonly("begin", &Token::begin)
        .def_readonly("end", &Token::end);

    py::class_<RuleTokenizer>(m, "RuleTokenizer")
        .def(py::init<>())
        .def("tokenize",
             [](const RuleTokenizer& t, const std::string& s) { return t.tokenize(s); })
        .def("count",
             [](const RuleTokenizer& t, const std::string& s) { return t.count(s); });

    py::class_<HashEmbedder>(m, "HashEmbedder")
        .def(py::init<int>(), py::arg("dimension") = 64)
        .def_property_readonly("dimension", &HashEmbedder::dimension)
        .def("embed",
             [](const HashEmbedder& e, const std::string& s) { return e.embed(s); });

    m.def("segment_sentences",
          [](const std::string& text) { return segment_sentences(text); });

    py::class_<Chunk>(m, "Chunk")
        .def_readonly("chunk_id", &Chunk::chunk_id)
        .def_readonly("doc_id", &Chunk::doc_id)
        .def_readonly("seq_index", &Chunk::seq_index)
        .def_readonly("text", &Chunk::text)
        .def_readonly("embedding", &Chunk::embedding);

    py::class_<Context>(m, "Context")
        .def_readonly("query_id", &Context::query_id)
        .def_readonly("sentences", &Context::sentences)
        .def_readonly("source_chunk_ids", &Context::source_chunk_ids)
        .def("text", [](const Context& c) { return context_text(c); });

    py::class_<RankedSentence>(m, "RankedSentence")
        .def_readonly("index", &RankedSentence::index)
        .def_readonly("similarity", &RankedSentence::similarity);

    py::class_<CompressedFragment>(m, "CompressedFragment")
        .def_readonly("gap_start", &CompressedFragment::gap_start)
        .def_readonly("text", &CompressedFragment::text);

    py::class_<ReducedContext>(m, "ReducedContext")
        .def_readonly("kept_indices", &ReducedContext::kept_indices)
        .def_readonly("fragments", &ReducedContext::fragments)
        .def_readonly("text", &ReducedContext::text)
        .def_readonly("original_tokens", &ReducedContext::original_tokens)
        .def_readonly("reduced_tokens", &ReducedContext::reduced_tokens)
        .def_readonly("tau", &ReducedContext::tau);

    py::class_<RougeScore>(m, "RougeScore")
        .def_readonly("precision", &RougeScore::precision)
        .def_readonly("recall", &RougeScore::recall)
        .def_readonly("f1", &RougeScore::f1);

    m.def("rouge_n", &rouge_n, py::arg("candidate"), py::arg("reference"), py::arg("n"));
    m.def("rouge_l", &rouge_l, py::arg("candidate"), py::arg("reference"));
    m.def("cost_savings", &cost_savings, py::arg("baseline_tokens"),
          py::arg("variant_tokens"));

    py::enum_<PromptKind>(m, "PromptKind")
        .value("QA", PromptKind::Qa)
        .value("CQSUMDP", PromptKind::CqSumDp)
        .value("SEMANTIC_COMPRESSION", PromptKind::SemanticCompression);

    m.def("render_prompt",
          [](PromptKind kind, const std::string& context, const py::object& query) {
              std::optional<std::string> q;
              if (!query.is_none()) {
                  q = query.cast<std::string>();
              }
              return render_prompt(kind, context, q);
          },
          py::arg("kind"), py::arg("context"), py::arg("query") = py::none());

    py::class_<RLAgent>(m, "RLAgent")
        .def_property_readonly("thresholds",
                               [](const RLAgent& a) { return a.thresholds; })
        .def_property_readonly("alpha", [](const RLAgent& a) { return a.alpha; })
        .def("policy", &RLAgent::policy, py::arg("state"));

    m.def("save_agent", &save_agent, py::arg("agent"), py::arg("path"));
    m.def("load_agent", &load_agent, py::arg("path"));
    m.def("compute_reward", &compute_reward, py::arg("r"), py::arg("r_star"),
          py::arg("tau"), py::arg("alpha"));

    py::class_<Pipeline>(m, "Pipeline")
        .def(py::init<int, int, int>(), py::arg("dimension") = 64,
             py::arg("chunk_size") = 500, py::arg("chunk_overlap") = 0)
        .def("add_document", &Pipeline::add_document, py::arg("doc_id"), py::arg("text"))
        .def("build_context", &Pipeline::build, py::arg("query"), py::arg("n_chunks") = 4)
        .def("reduce", &Pipeline::reduce, py::arg("context"), py::arg("query"),
             py::arg("theta"), py::arg("rate") = 0.8)
        .def("ask", &Pipeline::ask, py::arg("query"), py::arg("theta") = 0.2,
             py::arg("rate") = 0.8, py::arg("n_chunks") = 4)
        .def("train_agent", &Pipeline::train_agent, py::arg("qa_pairs"),
             py::arg("clusters") = 8,
             py::arg("thresholds") =
                 std::vector<double>{0.0, 0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4},
             py::arg("alpha") = 0.5, py::arg("rate") = 0.8, py::arg("n_chunks") = 4,
             py::arg("seed") = 7)
        .def("infer", &Pipeline::infer_with, py::arg("agent"), py::arg("query"),
             py::arg("rate") = 0.8, py::arg("n_chunks") = 4)
        .def_property_readonly("chunk_count", [](const Pipeline& p) {
            return p.store().chunks().size();
        });
}
