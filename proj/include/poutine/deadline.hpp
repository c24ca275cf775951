// SPDX-FileCopyrightText: Copyright (c) 2026 The Poutine Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>

namespace poutine {

/// Wall-clock instant plus an optional shared stop flag. Expired once either
/// the instant passes or the flag is raised.
class Deadline {
 public:
  using clock = std::chrono::steady_clock;

  Deadline() = default;
  explicit Deadline(clock::time_point at, const std::atomic<bool>* stop = nullptr)
      : at_(at), stop_(stop), bounded_(true) {}

  static Deadline never(const std::atomic<bool>* stop = nullptr) {
    Deadline d;
    d.stop_ = stop;
    return d;
  }

  static Deadline after(double seconds, const std::atomic<bool>* stop = nullptr) {
    return Deadline(clock::now() + std::chrono::duration_cast<clock::duration>(
                                       std::chrono::duration<double>(seconds)),
                    stop);
  }

  bool expired() const {
    if (stop_ != nullptr && stop_->load(std::memory_order_relaxed)) return true;
    return bounded_ && clock::now() >= at_;
  }

  bool bounded() const { return bounded_; }

  double remaining_seconds() const {
    if (!bounded_) return std::chrono::duration<double>::max().count();
    return std::max(0.0, std::chrono::duration<double>(at_ - clock::now()).count());
  }

  /// A deadline `fraction` of the remaining time away, sharing the stop flag.
  /// Unbounded deadlines stay unbounded.
  Deadline fraction_of_remaining(double fraction) const {
    if (!bounded_) return never(stop_);
    return after(remaining_seconds() * fraction, stop_);
  }

  /// The earlier of the two, keeping this deadline's stop flag.
  Deadline min(const Deadline& other) const {
    if (!other.bounded_) return *this;
    if (!bounded_ || other.at_ < at_) return Deadline(other.at_, stop_);
    return *this;
  }

  const std::atomic<bool>* stop_flag() const { return stop_; }

 private:
  clock::time_point at_{};
  const std::atomic<bool>* stop_ = nullptr;
  bool bounded_ = false;
};

}  // namespace poutine
