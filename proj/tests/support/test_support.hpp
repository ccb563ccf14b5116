#pragma once

#include <atomic>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <unistd.h>

#include <nlohmann/json.hpp>

namespace mhagent::test_util {

inline std::filesystem::path fixture(const std::string& name) {
    return std::filesystem::path(MHAGENT_FIXTURE_DIR) / name;
}

inline std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline nlohmann::json read_json(const std::filesystem::path& p) { return nlohmann::json::parse(read_file(p)); }

// Unique scratch directory removed on destruction.
class TempDir {
public:
    TempDir() {
        static std::atomic<int> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("mhagent-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

// Random words over a small alphabet, for generated texts and sessions.
inline std::string random_word(std::mt19937_64& rng, int min_len = 2, int max_len = 8) {
    std::uniform_int_distribution<int> len(min_len, max_len);
    std::uniform_int_distribution<int> ch('a', 'z');
    std::string w;
    const int n = len(rng);
    for (int i = 0; i < n; ++i) w.push_back(static_cast<char>(ch(rng)));
    return w;
}

inline std::string random_sentence(std::mt19937_64& rng, int min_words, int max_words) {
    std::uniform_int_distribution<int> n(min_words, max_words);
    std::string s;
    const int k = n(rng);
    for (int i = 0; i < k; ++i) {
        if (i) s += ' ';
        s += random_word(rng);
    }
    return s;
}

}  // namespace mhagent::test_util
