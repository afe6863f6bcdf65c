// Copyright 2026 The hmmqec Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include "hmmqec/trajectory.hpp"

#include "hmmqec/errors.hpp"
#include "hmmqec/rng.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <sstream>
#include <thread>

namespace hmmqec {

using numkit::identity;
using numkit::kron;

void ProtocolConfig::validate(int d_e, int pa_dim) const {
  if (env_state.rows() != d_e || env_state.cols() != d_e)
    throw InputError("protocol: environment state must be d_E x d_E");
  numkit::require_hermitian(env_state, "protocol.env_state", 1e-9);
  if (std::abs(env_state.trace() - 1.0) > 1e-10)
    throw InputError("protocol: environment state must have unit trace");
  if (prep.size() != pa_dim) throw InputError("protocol: preparation has the wrong dimension");
  if (std::abs(prep.norm() - 1.0) > 1e-10) throw InputError("protocol: preparation is not normalized");
  if (basis.rows() != pa_dim || basis.cols() < 1 || basis.cols() > pa_dim)
    throw InputError("protocol: measurement basis has the wrong shape");
  const auto k = basis.cols();
  if ((basis.adjoint() * basis - ComplexMatrix::Identity(k, k)).cwiseAbs().maxCoeff() > 1e-10)
    throw InputError("protocol: measurement basis is not orthonormal");
  if (!(dwell > 0.0)) throw InputError("protocol: dwell time must be positive");
  if (rounds < 1) throw InputError("protocol: rounds must be at least 1");
  if (samples < 1) throw InputError("protocol: samples must be at least 1");
  if (workers < 1) throw InputError("protocol: workers must be at least 1");
}

ProtocolConfig default_protocol(const ComplexMatrix& env_state, double dwell, int rounds,
                                long samples, std::uint64_t seed) {
  const double r = 1.0 / std::sqrt(2.0);
  ProtocolConfig cfg;
  cfg.env_state = env_state;
  cfg.prep = ComplexVector(2);
  cfg.prep << r, kI * r;
  cfg.basis = ComplexMatrix(2, 2);
  cfg.basis << r, r, r, -r;  // columns |+>, |->
  cfg.dwell = dwell;
  cfg.rounds = rounds;
  cfg.samples = samples;
  cfg.seed = seed;
  return cfg;
}

ProtocolConfig codeword_protocol(const MetrologyCode& code, const ComplexMatrix& env_state,
                                 double dwell, int rounds, long samples, std::uint64_t seed) {
  const double r = 1.0 / std::sqrt(2.0);
  ProtocolConfig cfg;
  cfg.env_state = env_state;
  cfg.prep = r * (code.c0 + code.c1);
  cfg.basis = ComplexMatrix(code.dim(), 2);
  cfg.basis.col(0) = r * (code.c0 + kI * code.c1);
  cfg.basis.col(1) = r * (code.c0 - kI * code.c1);
  cfg.dwell = dwell;
  cfg.rounds = rounds;
  cfg.samples = samples;
  cfg.seed = seed;
  return cfg;
}

RoundKernel make_round_kernel(const Liouvillian& l, int d_e, const ProtocolConfig& cfg) {
  const int pa = static_cast<int>(cfg.prep.size());
  if (l.dim != d_e * pa) throw InputError("round kernel: generator does not match E(x)PA");
  cfg.validate(d_e, pa);
  const AugmentedPropagator prop = make_propagator(l, cfg.dwell);
  const int n = l.dim;
  const ComplexMatrix psi = numkit::ket_bra(cfg.prep, cfg.prep);
  RoundKernel k;
  k.d_e = d_e;
  const int de2 = d_e * d_e;
  std::vector<ComplexMatrix> outs;  // per outcome: (I (x) <b|)
  for (Eigen::Index c = 0; c < cfg.basis.cols(); ++c) {
    outs.push_back(kron(identity(d_e), ComplexMatrix(cfg.basis.col(c).adjoint())));
    k.a.push_back(ComplexMatrix::Zero(de2, de2));
    k.b.push_back(ComplexMatrix::Zero(de2, de2));
  }
  for (int j = 0; j < d_e; ++j)
    for (int i = 0; i < d_e; ++i) {
      ComplexMatrix unit = ComplexMatrix::Zero(d_e, d_e);
      unit(i, j) = 1.0;
      const ComplexVector in = numkit::vec(kron(unit, psi));
      const ComplexMatrix x = numkit::unvec(prop.map * in, n, n);
      const ComplexMatrix dx = numkit::unvec(prop.dmap * in, n, n);
      for (std::size_t c = 0; c < outs.size(); ++c) {
        k.a[c].col(i + j * d_e) = numkit::vec(outs[c] * x * outs[c].adjoint());
        k.b[c].col(i + j * d_e) = numkit::vec(outs[c] * dx * outs[c].adjoint());
      }
    }
  return k;
}

RoundKernel make_round_kernel(const HmmModel& model, const ProtocolConfig& cfg) {
  const int pa = static_cast<int>(cfg.prep.size());
  if (pa % model.d_p != 0) throw InputError("round kernel: preparation does not fit the probe");
  const HmmModel m = model.with_auxiliary(pa / model.d_p);
  return make_round_kernel(build_liouvillian(m), m.d_e, cfg);
}

namespace {

Complex vec_trace(const ComplexVector& v, int d) {
  Complex t = 0.0;
  for (int i = 0; i < d; ++i) t += v(i + i * d);
  return t;
}

double checked_probability(double p) {
  if (p < -1e-9) {
    std::ostringstream os;
    os << "negative outcome probability " << p;
    throw NumericalFault(os.str());
  }
  return std::max(p, 0.0);
}

}  // namespace

RoundResult round_step(const RoundKernel& kernel, const EnvSensitivityPair& env, int outcome) {
  if (outcome < 0 || outcome >= kernel.outcomes()) throw InputError("round_step: bad outcome index");
  const int d = kernel.d_e;
  if (env.rho_e.rows() != d || env.drho_e.rows() != d)
    throw InputError("round_step: environment dimension mismatch");
  const ComplexVector r = numkit::vec(env.rho_e);
  const ComplexVector dr = numkit::vec(env.drho_e);
  const ComplexVector r1 = kernel.a[outcome] * r;
  const ComplexVector dr1 = kernel.a[outcome] * dr + kernel.b[outcome] * r;
  RoundResult out;
  out.probability = checked_probability(vec_trace(r1, d).real());
  out.dprobability = vec_trace(dr1, d).real();
  out.env.rho_e = numkit::unvec(r1, d, d);
  out.env.drho_e = numkit::unvec(dr1, d, d);
  return out;
}

RoundResult round_step(const HmmModel& model, const EnvSensitivityPair& env,
                       const ProtocolConfig& cfg, int outcome) {
  return round_step(make_round_kernel(model, cfg), env, outcome);
}

double exact_fi(const RoundKernel& kernel, const ProtocolConfig& cfg, long max_leaves) {
  const int nout = kernel.outcomes();
  const double leaves = std::pow(static_cast<double>(nout), cfg.rounds);
  if (leaves > static_cast<double>(max_leaves)) {
    std::ostringstream os;
    os << "exact_fi: " << nout << "^" << cfg.rounds << " outcome sequences exceed the budget of "
       << max_leaves << "; use mc_fi for this many rounds";
    throw InputError(os.str());
  }
  const int d = kernel.d_e;
  struct Node {
    ComplexVector r, dr;
    int depth;
  };
  std::vector<Node> stack;
  stack.push_back({numkit::vec(cfg.env_state), ComplexVector::Zero(d * d), 0});
  double fi = 0.0;
  while (!stack.empty()) {
    Node node = std::move(stack.back());
    stack.pop_back();
    for (int b = 0; b < nout; ++b) {
      ComplexVector r = kernel.a[b] * node.r;
      const double p = checked_probability(vec_trace(r, d).real());
      if (p < 1e-14) continue;
      ComplexVector dr = kernel.a[b] * node.dr + kernel.b[b] * node.r;
      if (node.depth + 1 == cfg.rounds) {
        const double dp = vec_trace(dr, d).real();
        fi += dp * dp / p;
      } else {
        stack.push_back({std::move(r), std::move(dr), node.depth + 1});
      }
    }
  }
  return fi;
}

double exact_fi(const HmmModel& model, const ProtocolConfig& cfg, long max_leaves) {
  return exact_fi(make_round_kernel(model, cfg), cfg, max_leaves);
}

namespace {

// Kernel copy with compile-time size N = d_E^2 (or Eigen::Dynamic) for the
// sampling hot loop. Trace functionals v -> Tr(unvec(A_b v)) are stored
// conjugated for Eigen's dot, so outcome probabilities cost a dot product.
template <int N>
struct SamplingKernel {
  using Vec = Eigen::Matrix<Complex, N, 1>;
  using Mat = Eigen::Matrix<Complex, N, N>;
  int d = 0;
  std::vector<Mat> a, b;
  std::vector<Vec> tr;
  Vec trace_fn;
  Vec start;

  SamplingKernel(const RoundKernel& k, const ComplexMatrix& env) : d(k.d_e) {
    const int n = d * d;
    trace_fn = Vec::Zero(n);
    for (int i = 0; i < d; ++i) trace_fn(i + i * d) = 1.0;
    for (int o = 0; o < k.outcomes(); ++o) {
      a.emplace_back(k.a[o]);
      b.emplace_back(k.b[o]);
      tr.emplace_back(k.a[o].adjoint() * trace_fn);
    }
    start = numkit::vec(env);
  }

  // Score dP/P of one sampled trajectory; NaN marks an aborted sample. The
  // branch state is renormalized every round, which leaves the ratio intact.
  double score(int rounds, RngStream rng, Vec& r, Vec& dr, Vec& scratch) const {
    const int nout = static_cast<int>(a.size());
    r = start;
    dr.setZero(start.size());
    for (int round = 0; round < rounds; ++round) {
      const double u = rng.uniform();
      double cumulative = 0.0;
      int chosen = nout - 1;
      double p_chosen = 0.0;
      for (int o = 0; o < nout; ++o) {
        const double p = checked_probability(tr[o].dot(r).real());
        cumulative += p;
        p_chosen = p;
        if (u < cumulative) {
          chosen = o;
          break;
        }
      }
      if (p_chosen < 1e-300) return std::numeric_limits<double>::quiet_NaN();
      const double inv = 1.0 / p_chosen;
      scratch.noalias() = a[chosen] * dr;
      scratch.noalias() += b[chosen] * r;
      dr = scratch * inv;
      scratch.noalias() = a[chosen] * r;
      r = scratch * inv;
    }
    return trace_fn.dot(dr).real();
  }
};

template <int N>
std::vector<double> sample_scores(const RoundKernel& kernel, const ProtocolConfig& cfg) {
  const long s = cfg.samples;
  std::vector<double> scores(static_cast<std::size_t>(s));
  const SamplingKernel<N> fast(kernel, cfg.env_state);
  const RngStream base(cfg.seed, cfg.stream);
  const int workers = static_cast<int>(std::max<long>(1, std::min<long>(cfg.workers, s)));
  std::vector<std::exception_ptr> errors(workers);
  auto work = [&](int w) {
    try {
      const int n = kernel.d_e * kernel.d_e;
      typename SamplingKernel<N>::Vec r(n), dr(n), scratch(n);
      for (long i = w; i < s; i += workers)
        scores[i] = fast.score(cfg.rounds, base.split(static_cast<std::uint64_t>(i)), r, dr, scratch);
    } catch (...) {
      errors[w] = std::current_exception();
    }
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> threads;
    for (int w = 0; w < workers; ++w) threads.emplace_back(work, w);
    for (auto& t : threads) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return scores;
}

}  // namespace

FiEstimate mc_fi(const RoundKernel& kernel, const ProtocolConfig& cfg) {
  if (cfg.samples < 1) throw InputError("mc_fi: samples must be at least 1");
  if (cfg.rounds < 1) throw InputError("mc_fi: rounds must be at least 1");
  if (cfg.env_state.rows() != kernel.d_e || cfg.env_state.cols() != kernel.d_e)
    throw InputError("mc_fi: environment state does not match the kernel");
  std::vector<double> scores;
  switch (kernel.d_e) {
    case 1: scores = sample_scores<1>(kernel, cfg); break;
    case 2: scores = sample_scores<4>(kernel, cfg); break;
    case 3: scores = sample_scores<9>(kernel, cfg); break;
    default: scores = sample_scores<Eigen::Dynamic>(kernel, cfg); break;
  }

  FiEstimate est;
  double sum2 = 0.0, sum4 = 0.0;
  for (double x : scores) {
    if (std::isnan(x)) {
      ++est.aborted;
      continue;
    }
    const double x2 = x * x;
    sum2 += x2;
    sum4 += x2 * x2;
    ++est.samples_used;
  }
  if (est.samples_used > 0) {
    const double n = static_cast<double>(est.samples_used);
    est.value = sum2 / n;
    est.variance_bound = sum4 / (n * n);
  }
  return est;
}

FiEstimate mc_fi(const HmmModel& model, const ProtocolConfig& cfg) {
  return mc_fi(make_round_kernel(model, cfg), cfg);
}

std::vector<std::pair<int, FiEstimate>> fi_curve(const RoundKernel& kernel,
                                                 const ProtocolConfig& cfg,
                                                 const std::vector<int>& n_values) {
  std::vector<std::pair<int, FiEstimate>> out;
  for (int n : n_values) {
    if (n < 1) throw InputError("fi_curve: rounds must be at least 1");
    ProtocolConfig c = cfg;
    c.rounds = n;
    c.stream = RngStream(cfg.seed, cfg.stream).split(static_cast<std::uint64_t>(n)).stream();
    out.emplace_back(n, mc_fi(kernel, c));
  }
  return out;
}

}  // namespace hmmqec
