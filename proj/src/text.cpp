#include "amb/text.hpp"

#include <algorithm>

#include <unicode/normalizer2.h>
#include <unicode/locid.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>

#include "amb/error.hpp"

namespace amb::scenealign {

Tokens normalize_text(std::string_view utf8) {
    UErrorCode status = U_ZERO_ERROR;
    const icu::Normalizer2* nfkd = icu::Normalizer2::getNFKDInstance(status);
    if (U_FAILURE(status)) throw Error("InternalError", "ICU NFKD normalizer unavailable");

    icu::UnicodeString src = icu::UnicodeString::fromUTF8(icu::StringPiece(utf8.data(), static_cast<int32_t>(utf8.size())));
    icu::UnicodeString decomposed = nfkd->normalize(src, status);
    if (U_FAILURE(status)) throw Error("InternalError", "NFKD normalization failed");
    decomposed.toLower(icu::Locale::getRoot());

    Tokens tokens;
    std::string current;
    auto flush = [&] {
        if (!current.empty()) tokens.push_back(std::move(current));
        current.clear();
    };
    for (int32_t i = 0; i < decomposed.length();) {
        const UChar32 cp = decomposed.char32At(i);
        i += U16_LENGTH(cp);
        if (u_isalpha(cp) || u_isdigit(cp)) {
            icu::UnicodeString(cp).toUTF8String(current);
        } else if (u_charType(cp) == U_NON_SPACING_MARK && !current.empty()) {
            continue;
        } else {
            flush();
        }
    }
    flush();
    return tokens;
}

double line_similarity(const Tokens& a, const Tokens& b) {
    if (a.empty() && b.empty()) return 1.0;
    if (a.empty() || b.empty()) return 0.0;

    Tokens sa = a, sb = b;
    std::sort(sa.begin(), sa.end());
    std::sort(sb.begin(), sb.end());
    std::size_t overlap = 0;
    for (auto i = sa.begin(), j = sb.begin(); i != sa.end() && j != sb.end();) {
        if (*i < *j) ++i;
        else if (*j < *i) ++j;
        else {
            ++overlap;
            ++i;
            ++j;
        }
    }
    return 2.0 * static_cast<double>(overlap) / static_cast<double>(a.size() + b.size());
}

}  // namespace amb::scenealign
