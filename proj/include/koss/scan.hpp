#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "koss/linalg.hpp"

namespace koss {
namespace scan {

// One step of the affine recurrence h' = m h + v.
struct ScanElement {
  SquareMatrix m;
  std::vector<double> v;

  ScanElement() = default;
  ScanElement(SquareMatrix mat, std::vector<double> vec);
  static ScanElement identity(int n);
  int order() const { return m.rows; }
};

// combine(e1, e2) applies e1 first: (m2 m1, m2 v1 + v2). Associative.
ScanElement combine(const ScanElement& e1, const ScanElement& e2);
void combine_into(const ScanElement& e1, const ScanElement& e2, ScanElement& out);

// h' = e.m h + e.v.
void apply_element(const ScanElement& e, const std::vector<double>& h, std::vector<double>& out);

struct SegmentPlan {
  int64_t total_len = 0;
  int64_t segment_len = 0;

  int64_t num_segments() const { return (total_len + segment_len - 1) / segment_len; }
  int64_t segment_start(int64_t seg) const { return seg * segment_len; }
  int64_t segment_size(int64_t seg) const;
  void validate() const;
};

// Inclusive states: out[t] = (e_t o ... o e_0)(h0). Work-efficient parallel
// path: length-32 blocks are composed in parallel, a Blelloch up/down sweep
// scans the block summaries, then per-block state recurrences run in
// parallel. Lengths <= 32 use a straight sequential loop. Combine topology
// is fixed, so results do not depend on the thread count.
std::vector<std::vector<double>> inclusive_scan(const std::vector<ScanElement>& elems,
                                                const std::vector<double>& h0);

// Fills segment elements; may read the boundary state (h at the end of the
// previous segment, h0 for the first). Must be pure in (positions, boundary).
using ElementFactory = std::function<void(int64_t seg, int64_t start, int64_t len,
                                          const std::vector<double>& boundary,
                                          ScanElement* out)>;

// Called once per segment with the segment's states, row-major len x n.
using SegmentSink =
    std::function<void(int64_t seg, int64_t start, int64_t len, const double* states)>;

struct ScanStats {
  int64_t boundary_states_stored = 0;
};

// Segment-wise scan: intra-segment inclusive scan seeded by the previous
// segment's final state, boundaries chained sequentially. Only the boundary
// states and the current segment's buffers are live at any time.
void segment_scan(const ElementFactory& factory, const SegmentPlan& plan, int n,
                  const std::vector<double>& h0, const SegmentSink& sink,
                  ScanStats* stats = nullptr);

// Convenience wrapper collecting every state.
std::vector<std::vector<double>> segment_scan_collect(const ElementFactory& factory,
                                                      const SegmentPlan& plan, int n,
                                                      const std::vector<double>& h0,
                                                      ScanStats* stats = nullptr);

struct BenchRow {
  int64_t segment_len;
  double median_ms;
  double speedup_vs_sequential;
};

struct BenchReport {
  double sequential_median_ms = 0.0;
  std::vector<BenchRow> rows;
  bool outputs_consistent = false;  // all configs matched the sequential states
};

// Times the sequential reference against segment_scan for each S. Elements
// are random spectral-radius-damped affine steps, identical across configs.
BenchReport bench_scan(int64_t total_len, const std::vector<int64_t>& segment_lens, int n_state,
                       int trials, uint64_t seed);

}  // namespace scan
}  // namespace koss
