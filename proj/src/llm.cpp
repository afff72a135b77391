#include "leanctx/llm.hpp"

#include <cmath>
#include <unordered_set>

#include "leanctx/errors.hpp"
#include "leanctx/sentences.hpp"

namespace leanctx {

namespace {

const std::string kQaTemplate =
    "Answer to the question based on the given context. Context: {CONTEXT}, "
    "Question: {QUERY}, if you do not find any answer in the context, simply "
    "return 'No answer'";

const std::string kCqSumDpTemplate =
    "A document along with its query is given below. Write down the most "
    "reasonable summary relevant to its document-query pair.\n"
    "Document: {CONTEXT}\n"
    "Query: {QUERY}";

const std::string kSemanticCompressionTemplate =
    "Please compress the following text into a latent representation that a "
    "different gpt-3.5-turbo model can decompress into the original text. The "
    "compression model should purely minimize the number of characters in the "
    "compressed representation while maintaining the semantics of the original "
    "text. The resulting compressed text does not need to be decompressed into "
    "the original text but should capture the semantics of the original text. "
    "The compressed text should be able to be decompressed into a text that is "
    "semantically similar to the original text but does not need to be "
    "identical.\n"
    "Text to Compress: {CONTEXT}";

void replace_once(std::string& text, const std::string& placeholder,
                  const std::string& value) {
    const std::size_t pos = text.find(placeholder);
    text.replace(pos, placeholder.size(), value);
}

// Section of `text` between `begin` and `end` markers; to the end of text
// when `end` is not found, empty when `begin` is not found.
std::string section_between(const std::string& text, const std::string& begin,
                            const std::string& end) {
    const std::size_t b = text.find(begin);
    if (b == std::string::npos) {
        return "";
    }
    const std::size_t payload = b + begin.size();
    const std::size_t e = end.empty() ? std::string::npos : text.find(end, payload);
    if (e == std::string::npos) {
        return text.substr(payload);
    }
    return text.substr(payload, e - payload);
}

std::unordered_set<std::string> word_set(std::string_view text, const Tokenizer& tokenizer) {
    std::unordered_set<std::string> words;
    for (const Token& token : tokenizer.tokenize(text)) {
        if (is_word_char(static_cast<unsigned char>(token.text[0]))) {
            words.insert(lowercase_ascii(token.text));
        }
    }
    return words;
}

} // namespace

const std::string& prompt_template(PromptKind kind) {
    switch (kind) {
    case PromptKind::Qa:
        return kQaTemplate;
    case PromptKind::CqSumDp:
        return kCqSumDpTemplate;
    case PromptKind::SemanticCompression:
        return kSemanticCompressionTemplate;
    }
    throw InvalidConfig("unknown prompt kind");
}

std::string render_prompt(PromptKind kind, const std::string& context,
                          const std::optional<std::string>& query) {
    const bool wants_query = kind != PromptKind::SemanticCompression;
    if (wants_query && !query.has_value()) {
        throw TemplateArityError("template requires a query");
    }
    if (!wants_query && query.has_value()) {
        throw TemplateArityError("template does not take a query");
    }

    std::string out = prompt_template(kind);
    replace_once(out, "{CONTEXT}", context);
    if (wants_query) {
        replace_once(out, "{QUERY}", *query);
    }
    return out;
}

CompletionRecord MockProvider::complete(const std::string& prompt) {
    if (prompt.empty()) {
        throw EmptyInput("prompt is empty");
    }
    calls_.fetch_add(1);

    std::string context = section_between(prompt, "Context: ", ", Question: ");
    std::string question = section_between(prompt, ", Question: ", ", if you do not find");
    if (context.empty()) {
        context = section_between(prompt, "Document: ", "\nQuery: ");
        question = section_between(prompt, "\nQuery: ", "");
    }
    if (context.empty()) {
        context = section_between(prompt, "Text to Compress: ", "");
    }
    if (context.empty()) {
        context = prompt;
    }

    const std::vector<std::string> candidates = segment_sentences(context);

    CompletionRecord record;
    if (candidates.empty()) {
        record.answer = "No answer";
    } else {
        const std::unordered_set<std::string> question_words = word_set(question, tokenizer_);
        std::size_t best = 0;
        std::size_t best_overlap = 0;
        for (std::size_t i = 0; i < candidates.size(); ++i) {
            std::size_t overlap = 0;
            for (const std::string& word : word_set(candidates[i], tokenizer_)) {
                if (question_words.count(word) != 0) {
                    ++overlap;
                }
            }
            if (overlap > best_overlap) {
                best_overlap = overlap;
                best = i;
            }
        }
        record.answer = candidates[best];
    }
    record.prompt_tokens = tokenizer_.count(prompt);
    record.completion_tokens = tokenizer_.count(record.answer);
    record.summary_tokens = 0;
    return record;
}

double cost(const CompletionRecord& record, const CostModel& model) {
    return model.price_per_1k_prompt *
               static_cast<double>(record.prompt_tokens + record.summary_tokens) / 1000.0 +
           model.price_per_1k_completion * static_cast<double>(record.completion_tokens) /
               1000.0;
}

double cost_savings(double total_tokens_baseline, double total_tokens_variant) {
    if (total_tokens_baseline <= 0.0) {
        throw DivisionByZero("baseline token count must be positive");
    }
    const double raw =
        100.0 * (total_tokens_baseline - total_tokens_variant) / total_tokens_baseline;
    return std::round(raw * 100.0) / 100.0;
}

} // namespace leanctx
