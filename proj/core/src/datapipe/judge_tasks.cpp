#include "mhagent/datapipe/judge_tasks.hpp"

#include <spdlog/spdlog.h>

#include <array>
#include <cctype>
#include <sstream>

#include "mhagent/domain/errors.hpp"
#include "mhagent/domain/extract.hpp"
#include "mhagent/domain/text.hpp"

namespace mhagent::datapipe {

using backend::ChatMessage;

const char* const kLabelingPrompt =
    "You are an experienced clinical psychologist. Read the counseling question a user posted and rate "
    "the severity of the depression and the anxiety it expresses. Use four levels: 0 minimal, 1 mild, "
    "2 moderate, 3 severe. Judge only from the text; this is not a diagnosis. "
    "Reply with one line in the form: depression:<level>, anxiety:<level>";

const char* const kSynthesisPrompt =
    "Rewrite the following single-turn counseling exchange as a natural multi-turn conversation between "
    "a client and a counselor with exactly 5 turns. In the early turns the counselor listens, asks "
    "follow-up questions to understand the client's concerns and reflects their emotional state; only in "
    "the final turns does the counselor give targeted, practical treatment suggestions drawn from the "
    "original answer. Keep every utterance concise and in the language of the input. "
    "Output one utterance per line, each starting with \"Client:\" or \"Counselor:\", and nothing else.";

const char* const kQualityPrompt =
    "You review data for a counseling dialogue corpus. Decide whether the sample below is coherent, "
    "relevant to the client's concern, respectful and safe. Low-quality, off-topic, truncated or harmful "
    "samples must be rejected. Answer with a single word: ACCEPT or REJECT.";

namespace {

const std::array<std::string_view, 7> kClientTags{"client", "user", "visitor", "seeker", "来访者", "求助者", "用户"};
const std::array<std::string_view, 7> kCounselorTags{"counselor", "counsellor", "therapist", "assistant",
                                                     "心理咨询师", "咨询师", "助手"};

std::string strip_decoration(std::string line) {
    line = text::trim(line);
    auto skip_marks = [&line](std::size_t i) {
        while (i < line.size() &&
               (line[i] == '-' || line[i] == '*' || line[i] == '#' || line[i] == '>' || line[i] == ' ')) {
            ++i;
        }
        return i;
    };
    std::size_t i = skip_marks(0);
    std::size_t j = i;
    while (j < line.size() && line[j] >= '0' && line[j] <= '9') ++j;
    if (j > i && j < line.size() && (line[j] == '.' || line[j] == ')')) i = skip_marks(j + 1);
    return text::trim(std::string_view(line).substr(i));
}

enum class Speaker { none, client, counselor };

// Detects "<tag>:" / "<tag>：" (optionally with markdown bold or a turn
// number after the tag) and returns the utterance body.
Speaker speaker_of(const std::string& line, std::string& body) {
    const std::string lower = text::to_lower_ascii(line);
    auto try_tags = [&](const auto& tags) {
        for (std::string_view tag : tags) {
            if (lower.compare(0, tag.size(), tag) != 0) continue;
            std::size_t k = tag.size();
            while (k < lower.size() && (lower[k] == '*' || lower[k] == ' ' || (lower[k] >= '0' && lower[k] <= '9'))) ++k;
            if (lower.compare(k, 1, ":") == 0) {
                body = text::trim(std::string_view(line).substr(k + 1));
            } else if (lower.compare(k, 3, "\xef\xbc\x9a") == 0) {
                body = text::trim(std::string_view(line).substr(k + 3));
            } else {
                continue;
            }
            while (!body.empty() && body.front() == '*') body.erase(body.begin());
            body = text::trim(body);
            return true;
        }
        return false;
    };
    if (try_tags(kClientTags)) return Speaker::client;
    if (try_tags(kCounselorTags)) return Speaker::counselor;
    return Speaker::none;
}

std::optional<std::vector<Turn>> parse_json_transcript(const std::string& raw) {
    const auto open = raw.find('[');
    const auto close = raw.rfind(']');
    if (open == std::string::npos || close == std::string::npos || close < open) return std::nullopt;
    const auto j = nlohmann::json::parse(raw.substr(open, close - open + 1), nullptr, false);
    if (!j.is_array()) return std::nullopt;
    std::vector<Turn> turns;
    for (const auto& t : j) {
        if (!t.is_object() || !t.contains("query") || !t.contains("reply") || !t["query"].is_string() ||
            !t["reply"].is_string()) {
            return std::nullopt;
        }
        turns.push_back(Turn{t["query"].get<std::string>(), t["reply"].get<std::string>()});
    }
    return turns;
}

void append_line(std::string& target, const std::string& line) {
    if (line.empty()) return;
    if (!target.empty()) target += '\n';
    target += line;
}

}  // namespace

LabeledSample label_sample(const std::string& question, backend::Backend& judge, const LabelConfig& config) {
    const std::size_t n = text::char_count(question);
    if (n <= config.min_question_chars) {
        throw InputError("question has " + std::to_string(n) + " characters; labeling needs more than " +
                         std::to_string(config.min_question_chars));
    }
    const std::vector<ChatMessage> request{backend::system_message(config.prompt), backend::user_message(question)};
    std::string last_error;
    for (int attempt = 0; attempt <= config.retries; ++attempt) {
        auto params = config.params;
        if (params.seed) params.seed = *params.seed + static_cast<std::uint64_t>(attempt);
        try {
            return LabeledSample{question, extract::mental_state(judge.generate(request, params))};
        } catch (const ParseError& e) {
            last_error = e.what();
        } catch (const RangeError& e) {
            last_error = e.what();
        } catch (const Error& e) {
            throw LabelError(std::string("judge failed: ") + e.what());
        }
        spdlog::debug("label attempt {} unusable: {}", attempt + 1, last_error);
    }
    throw LabelError("unusable judge reply after " + std::to_string(config.retries + 1) + " attempts: " + last_error);
}

std::vector<Turn> parse_transcript(const std::string& raw) {
    if (auto turns = parse_json_transcript(raw)) return *turns;

    std::vector<Turn> turns;
    Speaker current = Speaker::none;
    std::istringstream in(raw);
    std::string line;
    while (std::getline(in, line)) {
        line = strip_decoration(line);
        if (line.empty()) continue;
        std::string body;
        const Speaker who = speaker_of(line, body);
        if (who == Speaker::client) {
            // Consecutive client lines belong to the same query.
            if (current != Speaker::client) turns.push_back(Turn{});
            append_line(turns.back().query, body);
            current = Speaker::client;
        } else if (who == Speaker::counselor) {
            if (turns.empty()) throw SynthesisError("transcript starts with a counselor line");
            append_line(turns.back().reply, body);
            current = Speaker::counselor;
        } else if (current == Speaker::client) {
            append_line(turns.back().query, line);
        } else if (current == Speaker::counselor) {
            append_line(turns.back().reply, line);
        }
    }
    return turns;
}

Dialogue synthesize_dialogue(const QaPair& pair, backend::Backend& judge, const SynthesisConfig& config) {
    const std::string input = "Question:\n" + pair.question + "\n\nAnswer:\n" + pair.answer;
    const std::vector<ChatMessage> request{backend::system_message(config.prompt), backend::user_message(input)};
    std::string reply;
    try {
        reply = judge.generate(request, config.params);
    } catch (const Error& e) {
        throw SynthesisError(std::string("judge failed: ") + e.what());
    }
    auto turns = parse_transcript(reply);
    if (turns.size() != config.turns) {
        throw SynthesisError("expected " + std::to_string(config.turns) + " turns, got " +
                             std::to_string(turns.size()));
    }
    for (std::size_t i = 0; i < turns.size(); ++i) {
        if (turns[i].query.empty() || turns[i].reply.empty()) {
            throw SynthesisError("turn " + std::to_string(i + 1) + " is missing a query or a reply");
        }
    }
    Dialogue d;
    d.id = "syn-" + text::hex64(text::fnv1a64(pair.question + '\x1f' + pair.answer));
    d.topic = pair.topic;
    d.turns = std::move(turns);
    return d;
}

std::optional<Verdict> parse_verdict(const std::string& reply) {
    static const std::array<std::pair<std::string_view, Verdict>, 12> kWords{{
        {"unacceptable", Verdict::reject},
        {"reject", Verdict::reject},
        {"fail", Verdict::reject},
        {"不合格", Verdict::reject},
        {"不通过", Verdict::reject},
        {"拒绝", Verdict::reject},
        {"accept", Verdict::accept},
        {"pass", Verdict::accept},
        {"keep", Verdict::accept},
        {"合格", Verdict::accept},
        {"通过", Verdict::accept},
        {"保留", Verdict::accept},
    }};
    const std::string lower = text::to_lower_ascii(reply);
    std::size_t best = std::string::npos;
    std::optional<Verdict> verdict;
    for (const auto& [word, v] : kWords) {
        const bool ascii = static_cast<unsigned char>(word.front()) < 0x80;
        auto pos = lower.find(word);
        // ASCII words must start a word: "compassion" is not "pass".
        while (ascii && pos != std::string::npos && pos > 0 &&
               std::isalpha(static_cast<unsigned char>(lower[pos - 1]))) {
            pos = lower.find(word, pos + 1);
        }
        if (pos < best) {
            best = pos;
            verdict = v;
        }
    }
    return verdict;
}

void to_json(nlohmann::json& j, const QualityRecord& r) {
    j = nlohmann::json{{"index", r.index},   {"prompt_hash", r.prompt_hash}, {"input", r.input},
                       {"verdict", r.verdict}, {"reply", r.reply}};
    if (r.error) j["error"] = *r.error;
}

std::string render_for_quality(const QaPair& pair) {
    return "Question:\n" + pair.question + "\n\nAnswer:\n" + pair.answer;
}

std::string render_for_quality(const Dialogue& dialogue) {
    std::string out;
    for (const auto& t : dialogue.turns) {
        out += "Client: " + t.query + "\nCounselor: " + t.reply + "\n";
    }
    return out;
}

QualityRecord judge_quality(const std::string& rendered, std::size_t index, backend::Backend& judge,
                            const QualityConfig& config) {
    QualityRecord rec;
    rec.index = index;
    rec.prompt_hash = text::hex64(text::fnv1a64(config.prompt));
    rec.input = rendered;
    const std::vector<ChatMessage> request{backend::system_message(config.prompt), backend::user_message(rendered)};
    try {
        rec.reply = judge.generate(request, config.params);
    } catch (const Error& e) {
        spdlog::warn("quality judge failed on item {}: {}; keeping it unfiltered", index, e.what());
        rec.verdict = "unfiltered";
        rec.error = e.what();
        return rec;
    }
    const auto v = parse_verdict(rec.reply);
    if (!v) {
        spdlog::warn("quality judge verdict unreadable on item {}; keeping it unfiltered", index);
        rec.verdict = "unfiltered";
        rec.error = "no verdict in judge reply";
    } else {
        rec.verdict = *v == Verdict::accept ? "accept" : "reject";
    }
    return rec;
}

}  // namespace mhagent::datapipe
