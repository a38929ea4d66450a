#include "koss/scan.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

#include "koss/parallel.hpp"
#include "koss/rng.hpp"

namespace koss {
namespace scan {
namespace {

constexpr int64_t kBlock = 32;  // sequential-fallback threshold and block size

void matvec_into(const Matrix& m, const double* h, double* out) {
  const int n = m.rows;
  for (int i = 0; i < n; ++i) {
    const double* row = &m.a[static_cast<size_t>(i) * n];
    double s = 0.0;
    for (int j = 0; j < n; ++j) s += row[j] * h[j];
    out[i] = s;
  }
}

// states: row-major len x n. Sequential recurrence from h_init.
void run_sequential(const ScanElement* elems, int64_t len, const double* h_init, int n,
                    double* states) {
  std::vector<double> h(h_init, h_init + n);
  for (int64_t t = 0; t < len; ++t) {
    double* out = states + t * n;
    matvec_into(elems[t].m, h.data(), out);
    const double* v = elems[t].v.data();
    for (int i = 0; i < n; ++i) out[i] += v[i];
    h.assign(out, out + n);
  }
}

// Exclusive Blelloch up/down sweep; input padded to a power of two with
// identity elements. On return s[i] = e_{i-1} o ... o e_0 (s[0] = identity).
void exclusive_blelloch(std::vector<ScanElement>& s, int n) {
  const size_t g = s.size();
  size_t p = 1;
  while (p < g) p *= 2;
  std::vector<ScanElement> a(p, ScanElement::identity(n));
  for (size_t i = 0; i < g; ++i) a[i] = std::move(s[i]);

  for (size_t stride = 1; stride < p; stride *= 2)
    for (size_t i = 2 * stride - 1; i < p; i += 2 * stride)
      a[i] = combine(a[i - stride], a[i]);

  a[p - 1] = ScanElement::identity(n);
  for (size_t stride = p / 2; stride >= 1; stride /= 2) {
    for (size_t i = 2 * stride - 1; i < p; i += 2 * stride) {
      ScanElement left_sum = std::move(a[i - stride]);
      a[i - stride] = a[i];                  // left child: parent prefix
      a[i] = combine(a[i - stride], left_sum);  // right: prefix then left sum
    }
    if (stride == 1) break;
  }
  for (size_t i = 0; i < g; ++i) s[i] = std::move(a[i]);
}

}  // namespace

ScanElement::ScanElement(SquareMatrix mat, std::vector<double> vec)
    : m(std::move(mat)), v(std::move(vec)) {
  if (!m.is_square() || m.rows != static_cast<int>(v.size()))
    throw std::invalid_argument("ScanElement: shape mismatch");
}

ScanElement ScanElement::identity(int n) {
  return ScanElement(Matrix::identity(n), std::vector<double>(n, 0.0));
}

ScanElement combine(const ScanElement& e1, const ScanElement& e2) {
  ScanElement out;
  combine_into(e1, e2, out);
  return out;
}

void combine_into(const ScanElement& e1, const ScanElement& e2, ScanElement& out) {
  const int n = e1.order();
  if (e2.order() != n) throw std::invalid_argument("combine: order mismatch");
  if (out.order() != n) {
    out.m = Matrix(n, n);
    out.v.assign(n, 0.0);
  }
  // out.m = e2.m * e1.m
  for (int i = 0; i < n; ++i) {
    double* orow = &out.m.a[static_cast<size_t>(i) * n];
    for (int j = 0; j < n; ++j) orow[j] = 0.0;
    const double* arow = &e2.m.a[static_cast<size_t>(i) * n];
    for (int k = 0; k < n; ++k) {
      const double a = arow[k];
      const double* brow = &e1.m.a[static_cast<size_t>(k) * n];
      for (int j = 0; j < n; ++j) orow[j] += a * brow[j];
    }
  }
  // out.v = e2.m * e1.v + e2.v
  matvec_into(e2.m, e1.v.data(), out.v.data());
  for (int i = 0; i < n; ++i) out.v[i] += e2.v[i];
}

void apply_element(const ScanElement& e, const std::vector<double>& h, std::vector<double>& out) {
  const int n = e.order();
  out.resize(n);
  matvec_into(e.m, h.data(), out.data());
  for (int i = 0; i < n; ++i) out[i] += e.v[i];
}

int64_t SegmentPlan::segment_size(int64_t seg) const {
  const int64_t start = segment_start(seg);
  return std::min(segment_len, total_len - start);
}

void SegmentPlan::validate() const {
  if (total_len < 1) throw std::invalid_argument("SegmentPlan: total_len must be >= 1");
  if (segment_len < 1 || segment_len > total_len)
    throw std::invalid_argument("SegmentPlan: need 1 <= segment_len <= total_len");
}

namespace {

// Inclusive scan into a flat state buffer (len x n).
void scan_into(const ScanElement* elems, int64_t len, const std::vector<double>& h0, int n,
               double* states) {
  if (len <= kBlock) {
    run_sequential(elems, len, h0.data(), n, states);
    return;
  }
  const int64_t blocks = (len + kBlock - 1) / kBlock;

  // Phase 1: per-block affine summaries, parallel.
  std::vector<ScanElement> summaries(static_cast<size_t>(blocks));
  parallel_for_each(0, blocks, [&](int64_t b) {
    const int64_t begin = b * kBlock;
    const int64_t end = std::min(begin + kBlock, len);
    ScanElement acc = elems[begin];
    ScanElement tmp = ScanElement::identity(n);
    for (int64_t t = begin + 1; t < end; ++t) {
      combine_into(acc, elems[t], tmp);
      std::swap(acc, tmp);
    }
    summaries[static_cast<size_t>(b)] = std::move(acc);
  });

  // Phase 2: Blelloch exclusive scan over block summaries. Summary counts
  // are small (total_len / 32), so the sweep runs serially.
  exclusive_blelloch(summaries, n);

  // Phase 3: per-block state recurrences seeded by prefix(h0), parallel.
  parallel_for_each(0, blocks, [&](int64_t b) {
    const int64_t begin = b * kBlock;
    const int64_t end = std::min(begin + kBlock, len);
    std::vector<double> h_start;
    apply_element(summaries[static_cast<size_t>(b)], h0, h_start);
    run_sequential(elems + begin, end - begin, h_start.data(), n, states + begin * n);
  });
}

}  // namespace

std::vector<std::vector<double>> inclusive_scan(const std::vector<ScanElement>& elems,
                                                const std::vector<double>& h0) {
  if (elems.empty()) throw std::invalid_argument("inclusive_scan: empty input");
  const int n = elems[0].order();
  if (static_cast<int>(h0.size()) != n)
    throw std::invalid_argument("inclusive_scan: h0 size mismatch");
  std::vector<double> flat(static_cast<size_t>(elems.size()) * n);
  scan_into(elems.data(), static_cast<int64_t>(elems.size()), h0, n, flat.data());
  std::vector<std::vector<double>> out(elems.size());
  for (size_t t = 0; t < elems.size(); ++t)
    out[t].assign(&flat[t * n], &flat[t * n] + n);
  return out;
}

void segment_scan(const ElementFactory& factory, const SegmentPlan& plan, int n,
                  const std::vector<double>& h0, const SegmentSink& sink, ScanStats* stats) {
  plan.validate();
  if (static_cast<int>(h0.size()) != n)
    throw std::invalid_argument("segment_scan: h0 size mismatch");

  std::vector<ScanElement> elems(static_cast<size_t>(plan.segment_len), ScanElement::identity(n));
  std::vector<double> states(static_cast<size_t>(plan.segment_len) * n);
  std::vector<double> boundary = h0;
  int64_t stored = 0;

  const int64_t segments = plan.num_segments();
  for (int64_t seg = 0; seg < segments; ++seg) {
    const int64_t start = plan.segment_start(seg);
    const int64_t len = plan.segment_size(seg);
    factory(seg, start, len, boundary, elems.data());
    scan_into(elems.data(), len, boundary, n, states.data());
    boundary.assign(&states[(len - 1) * n], &states[(len - 1) * n] + n);
    ++stored;
    sink(seg, start, len, states.data());
  }
  if (stats) stats->boundary_states_stored = stored;
}

std::vector<std::vector<double>> segment_scan_collect(const ElementFactory& factory,
                                                      const SegmentPlan& plan, int n,
                                                      const std::vector<double>& h0,
                                                      ScanStats* stats) {
  std::vector<std::vector<double>> all(static_cast<size_t>(plan.total_len));
  segment_scan(
      factory, plan, n, h0,
      [&](int64_t, int64_t start, int64_t len, const double* states) {
        for (int64_t t = 0; t < len; ++t)
          all[static_cast<size_t>(start + t)].assign(states + t * n, states + (t + 1) * n);
      },
      stats);
  return all;
}

BenchReport bench_scan(int64_t total_len, const std::vector<int64_t>& segment_lens, int n_state,
                       int trials, uint64_t seed) {
  if (trials < 3) throw std::invalid_argument("bench_scan: trials must be >= 3");
  CounterRng rng(seed, 17);
  std::vector<ScanElement> elems;
  elems.reserve(static_cast<size_t>(total_len));
  for (int64_t t = 0; t < total_len; ++t) {
    Matrix m(n_state, n_state);
    for (double& v : m.a) v = rng.next_normal();
    // Damp toward spectral radius ~0.9 so long products stay bounded.
    const double scale = 0.9 / std::max(1e-9, norm1(m));
    for (double& v : m.a) v *= scale;
    std::vector<double> offset(static_cast<size_t>(n_state));
    for (double& v : offset) v = rng.next_normal();
    elems.emplace_back(std::move(m), std::move(offset));
  }
  std::vector<double> h0(static_cast<size_t>(n_state), 0.0);

  auto time_ms = [](const std::function<void()>& fn, int reps) {
    std::vector<double> samples;
    for (int r = 0; r < reps; ++r) {
      auto t0 = std::chrono::steady_clock::now();
      fn();
      auto t1 = std::chrono::steady_clock::now();
      samples.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
    }
    std::sort(samples.begin(), samples.end());
    return samples[samples.size() / 2];
  };

  std::vector<double> ref_states(static_cast<size_t>(total_len) * n_state);
  BenchReport report;
  report.sequential_median_ms = time_ms(
      [&] { run_sequential(elems.data(), total_len, h0.data(), n_state, ref_states.data()); },
      trials);

  ElementFactory factory = [&](int64_t, int64_t start, int64_t len, const std::vector<double>&,
                               ScanElement* out) {
    for (int64_t t = 0; t < len; ++t) out[t] = elems[static_cast<size_t>(start + t)];
  };

  report.outputs_consistent = true;
  std::vector<double> got(static_cast<size_t>(total_len) * n_state);
  for (int64_t s : segment_lens) {
    SegmentPlan plan{total_len, s};
    auto run = [&] {
      segment_scan(factory, plan, n_state, h0,
                   [&](int64_t, int64_t start, int64_t len, const double* states) {
                     std::copy(states, states + len * n_state, got.begin() + start * n_state);
                   });
    };
    const double ms = time_ms(run, trials);
    for (size_t i = 0; i < got.size(); ++i) {
      const double scale = std::max(1.0, std::fabs(ref_states[i]));
      if (std::fabs(got[i] - ref_states[i]) > 1e-9 * scale) {
        report.outputs_consistent = false;
        break;
      }
    }
    report.rows.push_back({s, ms, report.sequential_median_ms / ms});
  }
  return report;
}

}  // namespace scan
}  // namespace koss
