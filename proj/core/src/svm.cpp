#include "palms/svm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "palms/error.hpp"

namespace palms {

void ModelParams::validate() const {
  if (!(C > 0.0) || !std::isfinite(C)) throw UsageError("C must be positive and finite");
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw UsageError("gamma must be positive and finite");
  }
}

void SolverSettings::validate() const {
  if (!(kkt_tolerance > 0.0) || max_updates == 0 || !(numerical_epsilon > 0.0)) {
    throw UsageError("solver settings must all be positive");
  }
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw DataError("feature length mismatch: " + std::to_string(a.size()) + " vs " +
                    std::to_string(b.size()));
  }
  double s = 0.0;
  for (std::size_t f = 0; f < a.size(); ++f) {
    const double d = a[f] - b[f];
    s += d * d;
  }
  return s;
}

double rbf_kernel(std::span<const double> a, std::span<const double> b, double gamma) {
  return std::exp(-gamma * squared_distance(a, b));
}

namespace detail {

DualSolution solve_dual(std::span<const double> kernel, std::span<const int> signs, double C,
                        const SolverSettings& settings) {
  const std::size_t n = signs.size();
  const auto K = [&](std::size_t i, std::size_t j) { return kernel[i * n + j]; };
  const auto y = [&](std::size_t i) { return static_cast<double>(signs[i]); };

  DualSolution sol;
  sol.alpha.assign(n, 0.0);
  // gradient of 1/2 a'Qa - e'a with Q_ij = y_i y_j K_ij
  std::vector<double> grad(n, -1.0);
  auto& alpha = sol.alpha;

  const auto in_up = [&](std::size_t t) {
    return (signs[t] > 0 && alpha[t] < C) || (signs[t] < 0 && alpha[t] > 0.0);
  };
  const auto in_low = [&](std::size_t t) {
    return (signs[t] > 0 && alpha[t] > 0.0) || (signs[t] < 0 && alpha[t] < C);
  };

  const std::size_t budget = settings.max_updates;
  const double tau = settings.numerical_epsilon;
  double gap = std::numeric_limits<double>::infinity();
  std::size_t iter = 0;
  while (true) {
    // i: maximal violator; j: second-order choice (largest guaranteed decrease)
    // among the violating partners. Ties resolve to the smallest index.
    double up_max = -std::numeric_limits<double>::infinity();
    double low_min = std::numeric_limits<double>::infinity();
    std::size_t i = n;
    std::size_t j = n;
    for (std::size_t t = 0; t < n; ++t) {
      const double v = -y(t) * grad[t];
      if (in_up(t) && v > up_max) {
        up_max = v;
        i = t;
      }
      if (in_low(t) && v < low_min) low_min = v;
    }
    if (i != n) {
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t t = 0; t < n; ++t) {
        if (!in_low(t)) continue;
        const double b = up_max + y(t) * grad[t];
        if (b <= 0.0) continue;
        double a = K(i, i) + K(t, t) - 2.0 * K(i, t);
        if (a <= 0.0) a = tau;
        const double score = -(b * b) / a;
        if (score < best) {
          best = score;
          j = t;
        }
      }
    }
    gap = (i == n || j == n) ? 0.0 : up_max - low_min;
    if (gap <= settings.kkt_tolerance) break;
    if (iter >= budget) {
      std::ostringstream msg;
      msg << "SMO did not converge after " << iter << " updates (n=" << n << ", C=" << C
          << ", KKT gap=" << gap << ", tolerance=" << settings.kkt_tolerance << ")";
      throw SolverError(msg.str());
    }
    ++iter;

    const double Qii = K(i, i);
    const double Qjj = K(j, j);
    const double Qij = y(i) * y(j) * K(i, j);
    const double old_ai = alpha[i];
    const double old_aj = alpha[j];
    double ai = old_ai;
    double aj = old_aj;

    if (signs[i] != signs[j]) {
      double quad = Qii + Qjj + 2.0 * Qij;
      if (quad <= 0.0) quad = tau;
      const double delta = (-grad[i] - grad[j]) / quad;
      const double diff = ai - aj;
      ai += delta;
      aj += delta;
      if (diff > 0.0) {
        if (aj < 0.0) {
          aj = 0.0;
          ai = diff;
        }
      } else if (ai < 0.0) {
        ai = 0.0;
        aj = -diff;
      }
      if (diff > 0.0) {
        if (ai > C) {
          ai = C;
          aj = C - diff;
        }
      } else if (aj > C) {
        aj = C;
        ai = C + diff;
      }
    } else {
      double quad = Qii + Qjj - 2.0 * Qij;
      if (quad <= 0.0) quad = tau;
      const double delta = (grad[i] - grad[j]) / quad;
      const double sum = ai + aj;
      ai -= delta;
      aj += delta;
      if (sum > C) {
        if (ai > C) {
          ai = C;
          aj = sum - C;
        }
      } else if (aj < 0.0) {
        aj = 0.0;
        ai = sum;
      }
      if (sum > C) {
        if (aj > C) {
          aj = C;
          ai = sum - C;
        }
      } else if (ai < 0.0) {
        ai = 0.0;
        aj = sum;
      }
    }

    alpha[i] = ai;
    alpha[j] = aj;
    const double dai = ai - old_ai;
    const double daj = aj - old_aj;
    for (std::size_t k = 0; k < n; ++k) {
      grad[k] += y(k) * (y(i) * K(k, i) * dai + y(j) * K(k, j) * daj);
    }
  }

  // bias: mean over free vectors, else midpoint of the KKT-feasible interval
  double ub = std::numeric_limits<double>::infinity();
  double lb = -std::numeric_limits<double>::infinity();
  double sum_free = 0.0;
  std::size_t n_free = 0;
  for (std::size_t t = 0; t < n; ++t) {
    const double yg = y(t) * grad[t];
    if (alpha[t] >= C) {
      if (signs[t] < 0) ub = std::min(ub, yg); else lb = std::max(lb, yg);
    } else if (alpha[t] <= 0.0) {
      if (signs[t] > 0) ub = std::min(ub, yg); else lb = std::max(lb, yg);
    } else {
      ++n_free;
      sum_free += yg;
    }
  }
  double rho;
  if (n_free > 0) {
    rho = sum_free / static_cast<double>(n_free);
  } else if (std::isfinite(ub) && std::isfinite(lb)) {
    rho = 0.5 * (ub + lb);
  } else {
    rho = std::isfinite(ub) ? ub : (std::isfinite(lb) ? lb : 0.0);
  }
  sol.bias = -rho;
  sol.iterations = iter;
  sol.kkt_gap = gap;
  sol.free_count = n_free;
  return sol;
}

}  // namespace detail

TrainedSvm train_svc(const Dataset& train, const ModelParams& params,
                     const SolverSettings& settings) {
  params.validate();
  settings.validate();
  if (train.count(ClassLabel::kZero) == 0 || train.count(ClassLabel::kOne) == 0) {
    throw DataError("training set must contain both classes (" + std::to_string(train.size()) +
                    " points)");
  }
  const std::size_t n = train.size();
  std::vector<double> kernel(n * n);
  std::vector<int> signs(n);
  for (std::size_t i = 0; i < n; ++i) {
    signs[i] = to_sign(train[i].y);
    kernel[i * n + i] = 1.0;
    for (std::size_t j = 0; j < i; ++j) {
      const double k = rbf_kernel(train[i].x, train[j].x, params.gamma);
      kernel[i * n + j] = k;
      kernel[j * n + i] = k;
    }
  }
  const auto sol = detail::solve_dual(kernel, signs, params.C, settings);

  TrainedSvm model;
  model.params = params;
  model.n_features = train.n_features();
  model.training_size = n;
  model.bias = sol.bias;
  model.iterations = sol.iterations;
  model.kkt_gap = sol.kkt_gap;
  model.free_support_count = sol.free_count;
  for (std::size_t i = 0; i < n; ++i) {
    if (sol.alpha[i] > 0.0) {
      model.support_vectors.push_back(train[i].x);
      model.support_ids.push_back(train[i].id);
      model.dual_coefs.push_back(sol.alpha[i] * signs[i]);
    }
  }
  return model;
}

double decision_value(const TrainedSvm& model, std::span<const double> x) {
  if (x.size() != model.n_features) {
    throw DataError("feature length mismatch: model expects " +
                    std::to_string(model.n_features) + ", got " + std::to_string(x.size()));
  }
  double f = model.bias;
  for (std::size_t k = 0; k < model.support_vectors.size(); ++k) {
    f += model.dual_coefs[k] * rbf_kernel(model.support_vectors[k], x, model.params.gamma);
  }
  return f;
}

ClassLabel predict(const TrainedSvm& model, std::span<const double> x) {
  return label_for_value(decision_value(model, x));
}

double boundary_distance(const TrainedSvm& model, std::span<const double> x) {
  return std::abs(decision_value(model, x));
}

double accuracy(const TrainedSvm& model, const Dataset& data) {
  if (data.empty()) throw DataError("accuracy on an empty dataset");
  std::size_t correct = 0;
  for (const auto& p : data) {
    if (predict(model, p.x) == p.y) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(data.size());
}

double dual_objective(const TrainedSvm& model) {
  double linear = 0.0;
  double quad = 0.0;
  const std::size_t m = model.support_vectors.size();
  for (std::size_t k = 0; k < m; ++k) {
    linear += model.alpha(k);
    for (std::size_t l = 0; l < m; ++l) {
      quad += model.dual_coefs[k] * model.dual_coefs[l] *
              rbf_kernel(model.support_vectors[k], model.support_vectors[l], model.params.gamma);
    }
  }
  return linear - 0.5 * quad;
}

}  // namespace palms
