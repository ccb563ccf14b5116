#include "mhagent/domain/extract.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "mhagent/domain/errors.hpp"
#include "mhagent/domain/text.hpp"

namespace mhagent::extract {
namespace {

constexpr std::size_t kWindowBytes = 80;

// Lower-cases ASCII and folds full-width digits and separators so that
// byte-level scanning only has to know the ASCII forms.
std::string normalize(std::string_view reply) {
    std::u32string cps = text::decode_utf8(reply);
    for (char32_t& cp : cps) {
        if (cp >= U'A' && cp <= U'Z') cp = cp - U'A' + U'a';
        else if (cp >= 0xFF10 && cp <= 0xFF19) cp = U'0' + (cp - 0xFF10);
        else if (cp == 0xFF0E) cp = U'.';
        else if (cp == 0xFF5E || cp == 0x2013 || cp == 0x2014 || cp == 0x301C) cp = U'~';
        else if (cp == 0xFF1A) cp = U':';
    }
    return text::encode_utf8(cps);
}

bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_alpha(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }

struct Number {
    double value = 0.0;
    std::size_t end = 0;
    bool is_range = false;
};

std::size_t skip_spaces(std::string_view s, std::size_t i) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    return i;
}

std::size_t scan_digits(std::string_view s, std::size_t i) {
    while (i < s.size() && is_digit(s[i])) ++i;
    return i;
}

// Reads the number starting at `pos` (which must be a digit) and reports
// whether it is the lower end of a range notation like "0-3".
Number read_number(std::string_view s, std::size_t pos) {
    Number n;
    std::size_t i = scan_digits(s, pos);
    if (i + 1 < s.size() && s[i] == '.' && is_digit(s[i + 1])) i = scan_digits(s, i + 1);
    n.value = std::strtod(std::string(s.substr(pos, i - pos)).c_str(), nullptr);
    n.end = i;

    std::size_t j = skip_spaces(s, i);
    std::size_t after_sep = std::string_view::npos;
    if (j < s.size() && (s[j] == '-' || s[j] == '~')) {
        after_sep = j + 1;
    } else if (s.substr(j, 2) == "to" && (j + 2 >= s.size() || !is_alpha(s[j + 2]))) {
        after_sep = j + 2;
    } else if (s.substr(j, 3) == "\xE5\x88\xB0") {  // 到
        after_sep = j + 3;
    }
    if (after_sep != std::string_view::npos) {
        std::size_t k = skip_spaces(s, after_sep);
        if (k < s.size() && is_digit(s[k])) {
            n.is_range = true;
            n.end = scan_digits(s, k);
        }
    }
    return n;
}

struct Occurrence {
    std::size_t field = 0;
    std::size_t begin = 0;
    std::size_t end = 0;
};

std::vector<Occurrence> find_labels(std::string_view s, const std::vector<FieldSpec>& fields) {
    std::vector<Occurrence> occ;
    for (std::size_t f = 0; f < fields.size(); ++f) {
        for (const auto& label : fields[f].labels) {
            if (label.empty()) continue;
            const bool ascii = static_cast<unsigned char>(label[0]) < 0x80;
            std::size_t pos = 0;
            while ((pos = s.find(label, pos)) != std::string_view::npos) {
                const bool boundary = !ascii || pos == 0 || !is_alpha(s[pos - 1]);
                if (boundary) occ.push_back({f, pos, pos + label.size()});
                pos += label.size();
            }
        }
    }
    std::sort(occ.begin(), occ.end(), [](const Occurrence& a, const Occurrence& b) {
        return a.begin != b.begin ? a.begin < b.begin : a.end > b.end;
    });
    return occ;
}

std::optional<double> value_in_window(std::string_view s, std::size_t begin, std::size_t end,
                                      const FieldSpec& field) {
    std::size_t pos = begin;
    while (pos < end) {
        if (is_digit(s[pos])) {
            Number n = read_number(s, pos);
            if (!n.is_range) return n.value;
            pos = n.end;
            continue;
        }
        for (const auto& [word, value] : field.word_values) {
            if (s.substr(pos, word.size()) != word) continue;
            const bool ascii = static_cast<unsigned char>(word[0]) < 0x80;
            if (ascii && pos > 0 && is_alpha(s[pos - 1])) continue;
            return value;
        }
        ++pos;
    }
    return std::nullopt;
}

FieldSpec severity_field(std::string name, std::vector<std::string> labels) {
    FieldSpec f;
    f.name = std::move(name);
    f.labels = std::move(labels);
    // Longer spellings first so "moderately severe" reads as moderate.
    f.word_values = {{"minimal", 0}, {"none", 0}, {"normal", 0}, {"mild", 1},
                     {"moderate", 2}, {"severe", 3},
                     {"\xE6\x97\xA0", 0},                  // 无
                     {"\xE6\xAD\xA3\xE5\xB8\xB8", 0},      // 正常
                     {"\xE8\xBD\xBB\xE5\xBA\xA6", 1},      // 轻度
                     {"\xE4\xB8\xAD\xE5\xBA\xA6", 2},      // 中度
                     {"\xE9\x87\x8D\xE5\xBA\xA6", 3},      // 重度
                     {"\xE4\xB8\xA5\xE9\x87\x8D", 3}};     // 严重
    return f;
}

}  // namespace

std::vector<std::optional<double>> labeled_values(std::string_view reply,
                                                  const std::vector<FieldSpec>& fields) {
    const std::string s = normalize(reply);
    const auto occ = find_labels(s, fields);
    std::vector<std::optional<double>> out(fields.size());
    for (std::size_t i = 0; i < occ.size(); ++i) {
        const auto& o = occ[i];
        if (out[o.field]) continue;
        std::size_t end = std::min(s.size(), o.end + kWindowBytes);
        for (std::size_t k = i + 1; k < occ.size(); ++k) {
            if (occ[k].begin >= o.end) {
                end = std::min(end, occ[k].begin);
                break;
            }
        }
        if (end > o.end) out[o.field] = value_in_window(s, o.end, end, fields[o.field]);
    }
    return out;
}

std::vector<double> all_numbers(std::string_view reply) {
    const std::string s = normalize(reply);
    std::vector<double> out;
    std::size_t pos = 0;
    while (pos < s.size()) {
        if (!is_digit(s[pos])) {
            ++pos;
            continue;
        }
        Number n = read_number(s, pos);
        if (!n.is_range) out.push_back(n.value);
        pos = n.end;
    }
    return out;
}

const FieldSpec& depression_field() {
    static const FieldSpec f = severity_field(
        "depression", {"depression", "depressive", "\xE6\x8A\x91\xE9\x83\x81"});  // 抑郁
    return f;
}

const FieldSpec& anxiety_field() {
    static const FieldSpec f = severity_field(
        "anxiety", {"anxiety", "anxious", "\xE7\x84\xA6\xE8\x99\x91"});  // 焦虑
    return f;
}

MentalState mental_state(std::string_view reply) {
    const std::vector<FieldSpec> fields{depression_field(), anxiety_field()};
    const auto values = labeled_values(reply, fields);
    int levels[2] = {0, 0};
    for (std::size_t i = 0; i < 2; ++i) {
        if (!values[i]) throw ParseError(fields[i].name, "no severity found in model output");
        const double v = *values[i];
        if (v != std::floor(v)) throw ParseError(fields[i].name, "severity is not an integer");
        if (v < SeverityLevel::kMin || v > SeverityLevel::kMax) {
            throw RangeError("severity out of range: " + fields[i].name + "=" +
                             std::to_string(static_cast<long long>(v)));
        }
        levels[i] = static_cast<int>(v);
    }
    return MentalState{SeverityLevel(levels[0]), SeverityLevel(levels[1])};
}

}  // namespace mhagent::extract
