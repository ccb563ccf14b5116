#pragma once

#include <cstddef>
#include <utility>
#include <vector>

namespace mhagent::backend {

struct BatchConfig {
    int min_batch = 32;
    int max_batch = 512;
    // (input tokens, batch size) knots of a piecewise-linear map, tokens
    // strictly increasing and batch sizes non-decreasing. Empty means a single
    // ramp from (0, min_batch) to (ramp_tokens, max_batch).
    std::vector<std::pair<std::size_t, int>> knots;
    std::size_t ramp_tokens = 512;
};

// Chooses how many prompt tokens to feed per decode step from the length of
// the new input: short inputs use small batches, long inputs large ones.
class BatchSizer {
public:
    // Throws ConfigError on an invalid configuration.
    explicit BatchSizer(BatchConfig config = {});

    // Monotone non-decreasing; always within [min_batch, max_batch].
    int batch_size_for(std::size_t input_tokens) const;

    const BatchConfig& config() const { return config_; }

private:
    BatchConfig config_;
    std::vector<std::pair<std::size_t, int>> knots_;
};

}  // namespace mhagent::backend
