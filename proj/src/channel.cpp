#include "sumrate/channel.hpp"

#include <cmath>
#include <sstream>
#include <string>

namespace sumrate {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw DomainError(what);
}

bool all_positive(const VectorXd& v) {
  return v.size() > 0 && v.allFinite() && (v.array() > 0.0).all();
}

void check_weights(const VectorXd& w, Index n) {
  require(w.size() == n, "weights must have one entry per user");
  require(w.allFinite() && (w.array() >= 0.0).all(),
          "weights must be nonnegative");
  require(std::abs(w.sum() - 1.0) <= 1e-9, "weights must sum to one");
}

// One tone worth of normalized gains, written into the stacked matrices at
// stride `tones` starting at `tone`.
void fill_tone(const MatrixXd& g, const VectorXd& n, double snr_gap,
               Index tones, Index tone, MatrixXd& F, VectorXd& v) {
  const Index users = g.rows();
  for (Index l = 0; l < users; ++l) {
    const double direct = g(l, l) / snr_gap;
    const Index row = l * tones + tone;
    v[row] = n[l] / direct;
    for (Index j = 0; j < users; ++j) {
      F(row, j * tones + tone) = (j == l) ? 0.0 : g(l, j) / direct;
    }
  }
}

DerivedMatrices finish(MatrixXd F, VectorXd v, const VectorXd& slot_caps,
                       const std::vector<Index>& owner, Index users,
                       const VectorXd& user_caps) {
  DerivedMatrices d;
  const Index n = v.size();
  d.F_tilde = F;
  for (Index i = 0; i < n; ++i) d.F_tilde(i, i) = v[i] / slot_caps[i];
  d.B.reserve(users);
  for (Index l = 0; l < users; ++l) {
    MatrixXd b = F;
    for (Index j = 0; j < n; ++j) {
      if (owner[j] != l) continue;
      b.col(j) += v / user_caps[l];
    }
    d.B.push_back(std::move(b));
  }
  d.gamma_bar = slot_caps.array() / v.array();
  d.F = std::move(F);
  d.v = std::move(v);
  return d;
}

void require_size(const Problem& pr, const VectorXd& x, const char* what) {
  if (x.size() != pr.slots()) {
    std::ostringstream msg;
    msg << what << " has " << x.size() << " entries, expected " << pr.slots();
    throw DomainError(msg.str());
  }
}

void require_nonnegative(const VectorXd& x, const char* what) {
  if (!x.allFinite() || (x.array() < 0.0).any()) {
    throw DomainError(std::string(what) + " must be finite and nonnegative");
  }
}

}  // namespace

void ChannelInstance::validate() const {
  const Index n = users();
  require(n >= 2, "a channel needs at least two users");
  require(gains.cols() == n, "gain matrix must be square");
  require(gains.allFinite() && (gains.array() > 0.0).all(),
          "gains must be strictly positive");
  require(noise.size() == n && all_positive(noise),
          "noise must be positive, one entry per user");
  require(caps.size() == n && all_positive(caps),
          "caps must be positive, one entry per user");
  check_weights(weights, n);
  require(std::isfinite(snr_gap) && snr_gap >= 1.0, "snr_gap must be >= 1");
}

void MultiToneInstance::validate() const {
  require(users >= 2, "a channel needs at least two users");
  require(tones >= 1, "at least one tone is required");
  require(static_cast<Index>(gains.size()) == tones &&
              static_cast<Index>(noise.size()) == tones,
          "gains and noise need one entry per tone");
  for (Index k = 0; k < tones; ++k) {
    require(gains[k].rows() == users && gains[k].cols() == users,
            "per-tone gain matrices must be users x users");
    require(gains[k].allFinite() && (gains[k].array() > 0.0).all(),
            "gains must be strictly positive");
    require(noise[k].size() == users && all_positive(noise[k]),
            "per-tone noise must be positive, one entry per user");
  }
  require(caps.size() == users && all_positive(caps),
          "caps must be positive, one entry per user");
  check_weights(weights, users);
  require(std::isfinite(snr_gap) && snr_gap >= 1.0, "snr_gap must be >= 1");
  if (interference) {
    const Index n = users * tones;
    const MatrixXd& f = *interference;
    require(f.rows() == n && f.cols() == n,
            "explicit interference must be (users*tones) square");
    require(f.allFinite() && (f.array() >= 0.0).all(),
            "explicit interference must be nonnegative");
    require((f.diagonal().array() == 0.0).all(),
            "explicit interference must have a zero diagonal");
  }
}

DerivedMatrices derive_matrices(const ChannelInstance& inst) {
  return Problem::from(inst).m;
}

Problem Problem::from(const ChannelInstance& inst) {
  inst.validate();
  const Index n = inst.users();
  MatrixXd F(n, n);
  VectorXd v(n);
  fill_tone(inst.gains, inst.noise, inst.snr_gap, 1, 0, F, v);

  Problem pr;
  pr.users = n;
  pr.tones = 1;
  pr.user_caps = inst.caps;
  pr.slot_caps = inst.caps;
  pr.weights = inst.weights;
  pr.owner.resize(n);
  for (Index l = 0; l < n; ++l) pr.owner[l] = l;
  pr.m = finish(std::move(F), std::move(v), pr.slot_caps, pr.owner, n,
                pr.user_caps);
  return pr;
}

StackedChannel stack_multitone(const MultiToneInstance& mt) {
  mt.validate();
  const Index L = mt.users;
  const Index K = mt.tones;
  const Index n = L * K;
  MatrixXd F = MatrixXd::Zero(n, n);
  VectorXd v(n);
  for (Index k = 0; k < K; ++k) {
    fill_tone(mt.gains[k], mt.noise[k], mt.snr_gap, K, k, F, v);
  }
  if (mt.interference) F = *mt.interference;

  StackedChannel out;
  Problem& pr = out.problem;
  pr.users = L;
  pr.tones = K;
  pr.user_caps = mt.caps;
  pr.owner.resize(n);
  pr.slot_caps.resize(n);
  pr.weights.resize(n);
  for (Index l = 0; l < L; ++l) {
    for (Index k = 0; k < K; ++k) {
      const Index s = l * K + k;
      pr.owner[s] = l;
      pr.slot_caps[s] = mt.caps[l];
      pr.weights[s] = mt.weights[l] / static_cast<double>(K);
    }
  }
  for (Index i = 0; i < n && out.block_diagonal; ++i)
    for (Index j = 0; j < n; ++j)
      if (i % K != j % K && F(i, j) != 0.0) {
        out.block_diagonal = false;
        break;
      }
  pr.m = finish(std::move(F), std::move(v), pr.slot_caps, pr.owner, L,
                pr.user_caps);
  return out;
}

VectorXd sir_of_power(const Problem& pr, const VectorXd& p) {
  require_size(pr, p, "power vector");
  require_nonnegative(p, "power vector");
  return p.array() / (pr.m.F * p + pr.m.v).array();
}

VectorXd power_of_sir(const Problem& pr, const VectorXd& gamma) {
  require_size(pr, gamma, "SIR vector");
  require_nonnegative(gamma, "SIR vector");
  const MatrixXd scaled = gamma.asDiagonal() * pr.m.F;
  const double rho = spectral_radius(NonnegMatrix(scaled));
  if (rho >= 1.0) {
    std::ostringstream msg;
    msg << "SIR vector outside the achievable region: rho(diag(gamma) F) = "
        << rho;
    throw InfeasibleError(msg.str(), rho);
  }
  const Index n = gamma.size();
  VectorXd p = (MatrixXd::Identity(n, n) - scaled)
                   .partialPivLu()
                   .solve(gamma.cwiseProduct(pr.m.v));
  for (Index i = 0; i < n; ++i) {
    if (gamma[i] == 0.0 || p[i] < 0.0) p[i] = 0.0;
  }
  return p;
}

VectorXd constraint_radii(const Problem& pr, const VectorXd& gamma) {
  require_size(pr, gamma, "SIR vector");
  require_nonnegative(gamma, "SIR vector");
  VectorXd radii(pr.users);
  for (Index l = 0; l < pr.users; ++l) {
    radii[l] = spectral_radius(NonnegMatrix(gamma.asDiagonal() * pr.m.B[l]));
  }
  return radii;
}

RegionMembership in_achievable_region(const Problem& pr,
                                      const VectorXd& gamma) {
  RegionMembership out;
  out.radii = constraint_radii(pr, gamma);
  out.inside = (out.radii.array() <= 1.0 + kRegionTolerance).all();
  for (Index l = 0; l < pr.users; ++l) {
    if (std::abs(out.radii[l] - 1.0) <= kActiveTolerance) {
      out.active_set.push_back(l);
    }
  }
  return out;
}

VectorXd noiseless_sir(const Problem& pr, const VectorXd& p) {
  require_size(pr, p, "power vector");
  require_nonnegative(p, "power vector");
  if (!(p.array() > 0.0).any()) {
    throw DomainError("noiseless SIR needs a nonzero power vector");
  }
  const VectorXd interference = pr.m.F * p;
  for (Index l = 0; l < p.size(); ++l) {
    if (!(interference[l] > 0.0)) {
      std::ostringstream msg;
      msg << "noiseless SIR undefined: no interference at slot " << l;
      throw DomainError(msg.str());
    }
  }
  return p.array() / interference.array();
}

double objective(const VectorXd& w, const VectorXd& gamma) {
  if (w.size() != gamma.size()) throw DomainError("size mismatch");
  require_nonnegative(gamma, "SIR vector");
  double total = 0.0;
  for (Index l = 0; l < w.size(); ++l) total += w[l] * std::log1p(gamma[l]);
  return total;
}

double objective_log(const VectorXd& w, const VectorXd& gamma) {
  if (w.size() != gamma.size()) throw DomainError("size mismatch");
  double total = 0.0;
  for (Index l = 0; l < w.size(); ++l) {
    if (!(gamma[l] > 0.0)) {
      throw DomainError("log-SIR objective needs a positive SIR vector");
    }
    total += w[l] * std::log(gamma[l]);
  }
  return total;
}

MatrixXd sir_jacobian(const Problem& pr, const VectorXd& p) {
  const VectorXd gamma = sir_of_power(pr, p);
  const VectorXd denom = pr.m.F * p + pr.m.v;
  const Index n = p.size();
  MatrixXd h = MatrixXd::Identity(n, n) - gamma.asDiagonal() * pr.m.F;
  return denom.cwiseInverse().asDiagonal() * h;
}

VectorXd objective_gradient_p(const Problem& pr, const VectorXd& p) {
  const VectorXd gamma = sir_of_power(pr, p);
  const VectorXd outer =
      pr.weights.array() / (1.0 + gamma.array());
  return sir_jacobian(pr, p).transpose() * outer;
}

}  // namespace sumrate
