#include "mhagent/backend/decorators.hpp"

#include <fstream>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "mhagent/domain/errors.hpp"
#include "mhagent/domain/text.hpp"

namespace mhagent::backend {

SerializedBackend::SerializedBackend(std::shared_ptr<Backend> inner) : inner_(std::move(inner)) {}

std::string SerializedBackend::generate(std::span<const ChatMessage> messages,
                                        const GenerationParams& params) {
    std::lock_guard lock(mu_);
    return inner_->generate(messages, params);
}

std::string SerializedBackend::generate_stream(std::span<const ChatMessage> messages,
                                               const GenerationParams& params, const ChunkSink& on_chunk) {
    std::lock_guard lock(mu_);
    return inner_->generate_stream(messages, params, on_chunk);
}

CachingBackend::CachingBackend(std::shared_ptr<Backend> inner, std::filesystem::path dir)
    : inner_(std::move(inner)), dir_(std::move(dir)) {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec) throw IoError("cannot create cache dir " + dir_.string() + ": " + ec.message());
}

std::filesystem::path CachingBackend::entry_path(std::span<const ChatMessage> messages,
                                                 const GenerationParams& params) const {
    std::uint64_t prompt = text::fnv1a64("prompt");
    std::uint64_t input = text::fnv1a64("input");
    for (const auto& m : messages) {
        const std::string tagged = std::string(to_string(m.role)) + '\x1f' + m.content + '\x1e';
        if (m.role == Role::system) prompt = text::fnv1a64(tagged, prompt);
        else input = text::fnv1a64(tagged, input);
    }
    std::ostringstream p;
    p << params.temperature << '/' << params.max_tokens << '/' << (params.seed ? std::to_string(*params.seed) : "-");
    prompt = text::fnv1a64(p.str(), prompt);
    return dir_ / (text::hex64(prompt) + "-" + text::hex64(input) + ".json");
}

std::string CachingBackend::generate(std::span<const ChatMessage> messages,
                                     const GenerationParams& params) {
    const auto path = entry_path(messages, params);
    {
        std::ifstream in(path, std::ios::binary);
        if (in) {
            try {
                nlohmann::json j = nlohmann::json::parse(in);
                std::lock_guard lock(mu_);
                ++hits_;
                return j.at("reply").get<std::string>();
            } catch (const nlohmann::json::exception&) {
                // Corrupt entry: fall through and regenerate.
            }
        }
    }
    std::string reply = inner_->generate(messages, params);
    nlohmann::json entry{{"reply", reply}};
    auto tmp = path;
    tmp += "." + std::to_string(std::hash<std::thread::id>{}(std::this_thread::get_id())) + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        out << entry.dump();
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    std::lock_guard lock(mu_);
    ++misses_;
    return reply;
}

}  // namespace mhagent::backend
