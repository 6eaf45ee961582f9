#pragma once

#include <cstdint>

namespace rssm {

/// Floating-point-operation counter under a fixed accounting model:
///
///   dense (a x b)(b x c) multiply        2abc
///   k x k symmetric eigendecomposition   9k^3
///   entrywise pass over an a x b array   ab
///
/// The constants make counts comparable across methods run by this library;
/// they are not claimed comparable to hardware counters or to other codes.
/// Counters are owned by a single solver run and never shared across threads.
class FlopCounter {
 public:
  void add(std::uint64_t n) { count_ += n; }
  void add_gemm(std::uint64_t a, std::uint64_t b, std::uint64_t c) {
    count_ += 2 * a * b * c;
  }
  void add_eigh(std::uint64_t k) { count_ += 9 * k * k * k; }
  void add_entrywise(std::uint64_t a, std::uint64_t b) { count_ += a * b; }

  std::uint64_t count() const { return count_; }
  void reset() { count_ = 0; }

 private:
  std::uint64_t count_ = 0;
};

namespace detail {

inline void count_gemm(FlopCounter* fc, std::uint64_t a, std::uint64_t b,
                       std::uint64_t c) {
  if (fc) fc->add_gemm(a, b, c);
}
inline void count_eigh(FlopCounter* fc, std::uint64_t k) {
  if (fc) fc->add_eigh(k);
}
inline void count_entrywise(FlopCounter* fc, std::uint64_t a, std::uint64_t b) {
  if (fc) fc->add_entrywise(a, b);
}

}  // namespace detail
}  // namespace rssm
