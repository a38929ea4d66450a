#include "koss/layer.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "koss/parallel.hpp"
#include "koss/scan.hpp"

namespace koss {
namespace layer {
namespace {

double silu(double x) { return x / (1.0 + std::exp(-x)); }

double softplus(double x) {
  if (x > 30.0) return x;
  return std::log1p(std::exp(x));
}

}  // namespace

std::vector<double> KossParams::a_diag_row(int channel) const {
  std::vector<double> a(static_cast<size_t>(n_state));
  for (int i = 0; i < n_state; ++i) a[static_cast<size_t>(i)] = -std::exp(a_log(channel, i));
  return a;
}

KossParams KossParams::init(int d_model, int n_state, int mlp_hidden, CounterRng& rng) {
  KossParams p;
  p.d_model = d_model;
  p.n_state = n_state;

  p.a_log = Matrix(d_model, n_state);
  for (double& v : p.a_log.a) v = rng.next_uniform(-std::log(static_cast<double>(n_state)), 0.0);

  p.w_delta.assign(static_cast<size_t>(d_model), 0.0);
  p.b_delta.assign(static_cast<size_t>(d_model), 0.0);
  for (double& v : p.w_delta) v = 0.05 * rng.next_normal();
  for (double& v : p.b_delta) {
    const double target = std::exp(rng.next_uniform(std::log(1e-3), std::log(1e-1)));
    v = std::log(std::expm1(target));  // softplus inverse
  }

  const double c_scale = 1.0 / std::sqrt(static_cast<double>(d_model));
  p.w_c = Matrix(n_state, d_model);
  for (double& v : p.w_c.a) v = c_scale * rng.next_normal();

  const int hidden = 4 * n_state;
  p.gain.w1.assign(static_cast<size_t>(hidden), 0.0);
  p.gain.b1.assign(static_cast<size_t>(hidden), 0.0);
  for (double& v : p.gain.w1) v = rng.next_normal();
  p.gain.w2 = Matrix(n_state, hidden);
  const double g_scale = 1.0 / std::sqrt(static_cast<double>(hidden));
  for (double& v : p.gain.w2.a) v = g_scale * rng.next_normal();
  p.gain.b2.assign(static_cast<size_t>(n_state), 0.0);
  p.gain.scale = 0.5;

  p.spectral.dt = 1.0;
  p.spectral.mask_kind = sdu::MaskKind::kSoftExponential;
  p.spectral.omega_cut = 0.5 * 3.14159265358979323846 / p.spectral.dt;  // half Nyquist

  p.out_proj = Matrix(d_model, d_model);
  const double o_scale = 1.0 / std::sqrt(static_cast<double>(d_model));
  for (double& v : p.out_proj.a) v = o_scale * rng.next_normal();

  p.mlp_w1 = Matrix(mlp_hidden, d_model);
  for (double& v : p.mlp_w1.a) v = o_scale * rng.next_normal();
  p.mlp_b1.assign(static_cast<size_t>(mlp_hidden), 0.0);
  p.mlp_w2 = Matrix(d_model, mlp_hidden);
  const double m_scale = 1.0 / std::sqrt(static_cast<double>(mlp_hidden));
  for (double& v : p.mlp_w2.a) v = m_scale * rng.next_normal();
  p.mlp_b2.assign(static_cast<size_t>(d_model), 0.0);
  return p;
}

double innovation(double x_t, const std::vector<double>& c_t, const std::vector<double>& h_ctx) {
  if (c_t.size() != h_ctx.size()) throw std::invalid_argument("innovation: size mismatch");
  double s = 0.0;
  for (size_t i = 0; i < c_t.size(); ++i) s += c_t[i] * h_ctx[i];
  return x_t - s;
}

std::vector<double> gain_net(double innov, const GainNet& net) {
  const size_t hidden = net.w1.size();
  std::vector<double> h(hidden);
  for (size_t i = 0; i < hidden; ++i) h[i] = silu(net.w1[i] * innov + net.b1[i]);
  const int n = net.w2.rows;
  std::vector<double> k(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    double s = net.b2[static_cast<size_t>(i)];
    const double* row = &net.w2.a[static_cast<size_t>(i) * net.w2.cols];
    for (size_t j = 0; j < hidden; ++j) s += row[j] * h[j];
    k[static_cast<size_t>(i)] = net.scale * std::tanh(s);
  }
  return k;
}

Dynamics build_dynamics(const std::vector<double>& a_diag, const std::vector<double>& k,
                        const std::vector<double>& c_row) {
  const int n = static_cast<int>(a_diag.size());
  if (static_cast<int>(k.size()) != n || static_cast<int>(c_row.size()) != n)
    throw std::invalid_argument("build_dynamics: size mismatch");

  // ca = C A (row); s1 = (C A) K; M K = a o k - s1 k.
  std::vector<double> ca(static_cast<size_t>(n));
  double s1 = 0.0;
  for (int j = 0; j < n; ++j) {
    ca[static_cast<size_t>(j)] = c_row[static_cast<size_t>(j)] * a_diag[static_cast<size_t>(j)];
    s1 += ca[static_cast<size_t>(j)] * k[static_cast<size_t>(j)];
  }
  std::vector<double> mk(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i)
    mk[static_cast<size_t>(i)] =
        a_diag[static_cast<size_t>(i)] * k[static_cast<size_t>(i)] - s1 * k[static_cast<size_t>(i)];

  Dynamics dyn;
  dyn.a_k = Matrix(n, n);
  for (int i = 0; i < n; ++i) {
    double* row = &dyn.a_k.a[static_cast<size_t>(i) * n];
    const double ki = k[static_cast<size_t>(i)];
    const double mki = mk[static_cast<size_t>(i)];
    for (int j = 0; j < n; ++j)
      row[j] = -ki * ca[static_cast<size_t>(j)] + mki * c_row[static_cast<size_t>(j)];
    row[i] += a_diag[static_cast<size_t>(i)];
  }
  dyn.b_k.resize(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) dyn.b_k[static_cast<size_t>(i)] = -mk[static_cast<size_t>(i)];
  return dyn;
}

StepDynamics discretize(const SquareMatrix& a_k, const std::vector<double>& b_k, double delta,
                        DiscretizeMode mode) {
  if (delta <= 0.0) throw std::invalid_argument("discretize: delta must be positive");
  const int n = a_k.rows;
  StepDynamics out;
  if (mode == DiscretizeMode::kEuler) {
    out.a_bar = Matrix::identity(n) + delta * a_k;
    out.b_bar.resize(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) out.b_bar[static_cast<size_t>(i)] = delta * b_k[static_cast<size_t>(i)];
    return out;
  }

  Matrix da = delta * a_k;
  out.a_bar = mat_exp(da);
  Matrix rhs_m = out.a_bar - Matrix::identity(n);
  std::vector<double> rhs = matvec(rhs_m, b_k);
  try {
    out.b_bar = solve_linear(a_k, rhs);
    return out;
  } catch (const std::runtime_error&) {
    if (norm1(da) >= 0.5)
      throw std::runtime_error("discretize: A_K near singular and ||delta A_K|| >= 0.5");
  }
  // Series: sum_m delta^{m+1} A_K^m B_K / (m+1)!
  std::vector<double> term(b_k);
  for (double& v : term) v *= delta;
  out.b_bar = term;
  for (int m = 1; m <= 24; ++m) {
    term = matvec(a_k, term);
    const double f = delta / static_cast<double>(m + 1);
    double mag = 0.0;
    for (double& v : term) {
      v *= f;
      mag = std::max(mag, std::fabs(v));
    }
    for (int i = 0; i < n; ++i) out.b_bar[static_cast<size_t>(i)] += term[static_cast<size_t>(i)];
    if (mag < 1e-18) break;
  }
  return out;
}

std::vector<double> recurrence_step(const std::vector<double>& h, double x_t, double dx_t,
                                    const StepDynamics& dyn) {
  const int n = dyn.a_bar.rows;
  std::vector<double> out = matvec(dyn.a_bar, h);
  for (int i = 0; i < n; ++i)
    out[static_cast<size_t>(i)] +=
        dyn.b_bar[static_cast<size_t>(i)] * x_t + dyn.k[static_cast<size_t>(i)] * dx_t;
  return out;
}

LayerOutput layer_forward(const Tensor& x, const KossParams& params, int64_t segment_len) {
  if (x.rank() != 3) throw std::invalid_argument("layer_forward: expected B x L x D input");
  const int64_t b_sz = x.dim(0), len = x.dim(1), d = x.dim(2);
  if (d != params.d_model) throw std::invalid_argument("layer_forward: channel count mismatch");
  if (segment_len < 1 || segment_len > len)
    throw std::invalid_argument("layer_forward: need 1 <= segment_len <= L");
  const int n = params.n_state;

  sdu::SpectralConfig cfg = params.spectral;
  cfg.n = len;

  LayerOutput out;
  out.y = Tensor({b_sz, len, d});
  out.final_state.h = Tensor({b_sz, d, n});
  out.final_state.h_ctx = Tensor({b_sz, d, n});

  scan::SegmentPlan plan{len, segment_len};

  // Shared per-position observation rows and step sizes.
  // c[b][l] in R^n, delta[b][l][d_ch].
  std::vector<double> c_rows(static_cast<size_t>(b_sz * len * n));
  std::vector<double> deltas(static_cast<size_t>(b_sz * len * d));
  std::vector<double> dx(static_cast<size_t>(b_sz * len * d));

  parallel_for_each(0, b_sz, [&](int64_t b) {
    std::vector<double> series(static_cast<size_t>(len));
    for (int64_t ch = 0; ch < d; ++ch) {
      for (int64_t l = 0; l < len; ++l) series[static_cast<size_t>(l)] = x.at({b, l, ch});
      std::vector<double> ds = sdu::spectral_derivative(series, cfg);
      for (int64_t l = 0; l < len; ++l) dx[static_cast<size_t>((b * len + l) * d + ch)] = ds[static_cast<size_t>(l)];
    }
    for (int64_t l = 0; l < len; ++l) {
      for (int i = 0; i < n; ++i) {
        double s = 0.0;
        const double* row = &params.w_c.a[static_cast<size_t>(i) * d];
        for (int64_t ch = 0; ch < d; ++ch) s += row[ch] * x.at({b, l, ch});
        c_rows[static_cast<size_t>((b * len + l) * n + i)] = s;
      }
      for (int64_t ch = 0; ch < d; ++ch)
        deltas[static_cast<size_t>((b * len + l) * d + ch)] =
            softplus(params.b_delta[static_cast<size_t>(ch)] +
                     x.at({b, l, ch}) * params.w_delta[static_cast<size_t>(ch)]);
    }
  });

  // Each (batch, channel) pair runs an independent segment-wise scan.
  parallel_for_each(0, b_sz * d, [&](int64_t idx) {
    const int64_t b = idx / d;
    const int64_t ch = idx % d;
    const std::vector<double> a_diag = params.a_diag_row(static_cast<int>(ch));
    std::vector<double> k_buf;

    scan::ElementFactory factory = [&](int64_t, int64_t start, int64_t seg_len,
                                       const std::vector<double>& boundary,
                                       scan::ScanElement* elems) {
      std::vector<double> c_l(static_cast<size_t>(n));
      for (int64_t t = 0; t < seg_len; ++t) {
        const int64_t l = start + t;
        const double xv = x.at({b, l, ch});
        const double dxv = dx[static_cast<size_t>((b * len + l) * d + ch)];
        const double dl = deltas[static_cast<size_t>((b * len + l) * d + ch)];
        const double* c_ptr = &c_rows[static_cast<size_t>((b * len + l) * n)];
        c_l.assign(c_ptr, c_ptr + n);
        const double gain_in = params.gain_from_input ? xv : innovation(xv, c_l, boundary);
        k_buf = gain_net(gain_in, params.gain);
        Dynamics dyn = build_dynamics(a_diag, k_buf, c_l);
        StepDynamics sd = discretize(dyn.a_k, dyn.b_k, dl, params.disc_mode);
        elems[t].m = std::move(sd.a_bar);
        elems[t].v.resize(static_cast<size_t>(n));
        for (int i = 0; i < n; ++i)
          elems[t].v[static_cast<size_t>(i)] =
              sd.b_bar[static_cast<size_t>(i)] * xv + k_buf[static_cast<size_t>(i)] * dxv;
      }
    };

    std::vector<double> h0(static_cast<size_t>(n), 0.0);
    std::vector<double> last_boundary(static_cast<size_t>(n), 0.0);
    scan::segment_scan(
        factory, plan, n, h0,
        [&](int64_t, int64_t start, int64_t seg_len, const double* states) {
          for (int64_t t = 0; t < seg_len; ++t) {
            const int64_t l = start + t;
            const double* c_ptr = &c_rows[static_cast<size_t>((b * len + l) * n)];
            const double* h = states + t * n;
            double s = 0.0;
            for (int i = 0; i < n; ++i) s += c_ptr[i] * h[i];
            out.y.at({b, l, ch}) = s;
          }
          const double* h_last = states + (seg_len - 1) * n;
          std::copy(h_last, h_last + n, last_boundary.begin());
        });

    for (int i = 0; i < n; ++i) {
      out.final_state.h.at({b, ch, i}) = last_boundary[static_cast<size_t>(i)];
      out.final_state.h_ctx.at({b, ch, i}) = last_boundary[static_cast<size_t>(i)];
    }
  });

  if (!out.y.all_finite()) {
    for (int64_t b = 0; b < b_sz; ++b)
      for (int64_t l = 0; l < len; ++l)
        for (int64_t ch = 0; ch < d; ++ch)
          if (!std::isfinite(out.y.at({b, l, ch})))
            throw std::runtime_error("layer_forward: non-finite activation at (b=" +
                                     std::to_string(b) + ", l=" + std::to_string(l) +
                                     ", d=" + std::to_string(ch) + ")");
  }
  return out;
}

Tensor block_forward(const Tensor& x, const KossParams& params, int64_t segment_len) {
  LayerOutput lo = layer_forward(x, params, segment_len);
  const int64_t b_sz = x.dim(0), len = x.dim(1), d = x.dim(2);
  const int hm = params.mlp_w1.rows;

  Tensor out({b_sz, len, d});
  std::vector<double> z(static_cast<size_t>(d)), hid(static_cast<size_t>(hm));
  for (int64_t b = 0; b < b_sz; ++b) {
    for (int64_t l = 0; l < len; ++l) {
      for (int64_t i = 0; i < d; ++i) {
        double s = x.at({b, l, i});
        const double* row = &params.out_proj.a[static_cast<size_t>(i) * d];
        for (int64_t j = 0; j < d; ++j) s += row[j] * lo.y.at({b, l, j});
        z[static_cast<size_t>(i)] = s;
      }
      for (int i = 0; i < hm; ++i) {
        double s = params.mlp_b1[static_cast<size_t>(i)];
        const double* row = &params.mlp_w1.a[static_cast<size_t>(i) * d];
        for (int64_t j = 0; j < d; ++j) s += row[j] * z[static_cast<size_t>(j)];
        hid[static_cast<size_t>(i)] = silu(s);
      }
      for (int64_t i = 0; i < d; ++i) {
        double s = params.mlp_b2[static_cast<size_t>(i)];
        const double* row = &params.mlp_w2.a[static_cast<size_t>(i) * hm];
        for (int j = 0; j < hm; ++j) s += row[j] * hid[static_cast<size_t>(j)];
        out.at({b, l, i}) = z[static_cast<size_t>(i)] + s;
      }
    }
  }
  return out;
}

}  // namespace layer
}  // namespace koss
