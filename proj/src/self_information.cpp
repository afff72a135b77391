#include "leanctx/self_information.hpp"

#include <cmath>

namespace leanctx {

void UnigramModel::add_text(std::string_view text, const Tokenizer& tokenizer) {
    for (const Token& token : tokenizer.tokenize(text)) {
        ++counts_[lowercase_ascii(token.text)];
        ++total_;
    }
}

double UnigramModel::information(std::string_view unit) const {
    const std::string key = lowercase_ascii(unit);
    long long count = 0;
    if (const auto it = counts_.find(key); it != counts_.end()) {
        count = it->second;
    }
    const double p = static_cast<double>(count + 1) /
                     static_cast<double>(total_ + static_cast<long long>(counts_.size()) + 1);
    return -std::log2(p);
}

} // namespace leanctx
