#pragma once

#include "jmls/mixture.hpp"
#include "jmls/model.hpp"

namespace jmls {

/// Measurement update of one weighted component:
///   eta = C mu + D ubar, Xi = C P C^T + R, K = P C^T Xi^{-1},
///   mu+ = mu + K (y - eta), P+ = P - K C P, log w+ = log w + log N(y | eta, Xi).
GaussianComponent kalman_correct(const GaussianComponent& comp, const DecorrelatedModel& model,
                                 const Vector& ubar, const Vector& y);

/// Time update: mu+ = A mu + B ubar, P+ = A P A^T + Q, log w+ = log w + log t.
/// `transition` = 0 gives log w+ = -inf.
GaussianComponent kalman_predict(const GaussianComponent& comp, const DecorrelatedModel& model,
                                 const Vector& ubar, double transition);

/// Conditions a filtered component at k on a sampled x_{k+1} (backward step):
///   eta = A mu + B ubar, Xi = A P A^T + Q, K = P A^T Xi^{-1},
///   mu = mu + K (x_next - eta), P = (I - K A) P,
///   log w = log t + log w + log N(x_next | eta, Xi).
GaussianComponent kalman_smooth(const GaussianComponent& comp, const DecorrelatedModel& model,
                                const Vector& ubar, const Vector& x_next, double transition);

}  // namespace jmls
