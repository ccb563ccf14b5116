#include "mhagent/backend/batch.hpp"

#include <algorithm>

#include "mhagent/domain/errors.hpp"

namespace mhagent::backend {

BatchSizer::BatchSizer(BatchConfig config) : config_(std::move(config)) {
    if (config_.min_batch < 1) throw ConfigError("min_batch must be >= 1");
    if (config_.max_batch < config_.min_batch) throw ConfigError("max_batch must be >= min_batch");
    knots_ = config_.knots;
    if (knots_.empty()) {
        if (config_.ramp_tokens == 0) throw ConfigError("ramp_tokens must be >= 1");
        knots_ = {{0, config_.min_batch}, {config_.ramp_tokens, config_.max_batch}};
    }
    for (std::size_t i = 1; i < knots_.size(); ++i) {
        if (knots_[i].first <= knots_[i - 1].first) throw ConfigError("batch knots must have increasing tokens");
        if (knots_[i].second < knots_[i - 1].second) throw ConfigError("batch knots must be non-decreasing");
    }
}

int BatchSizer::batch_size_for(std::size_t input_tokens) const {
    int raw;
    if (input_tokens <= knots_.front().first) {
        raw = knots_.front().second;
    } else if (input_tokens >= knots_.back().first) {
        raw = knots_.back().second;
    } else {
        auto hi = std::upper_bound(knots_.begin(), knots_.end(), input_tokens,
                                   [](std::size_t t, const auto& k) { return t < k.first; });
        auto lo = hi - 1;
        const double frac = static_cast<double>(input_tokens - lo->first) /
                            static_cast<double>(hi->first - lo->first);
        raw = lo->second + static_cast<int>(frac * (hi->second - lo->second));
    }
    return std::clamp(raw, config_.min_batch, config_.max_batch);
}

}  // namespace mhagent::backend
