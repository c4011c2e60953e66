#include "hawkes_ls/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "hawkes_ls/detail/overloaded.hpp"
#include "hawkes_ls/error.hpp"

namespace hawkes_ls {

using detail::Overloaded;

Kernel::Kernel(Form form) : form_(std::move(form)) {
  std::visit(
      Overloaded{
          [this](const Exponential& e) {
            if (!(e.alpha >= 0.0) || !std::isfinite(e.alpha) || !(e.beta > 0.0) ||
                !std::isfinite(e.beta))
              throw InvalidKernel("exponential kernel needs alpha >= 0 and beta > 0");
            scale_ = e.alpha * e.beta;
          },
          [this](const PowerLaw& k) {
            if (!(k.alpha >= 0.0) || !std::isfinite(k.alpha) || !(k.gamma > 0.0) ||
                !std::isfinite(k.gamma) || !(k.beta > 1.0) || !std::isfinite(k.beta))
              throw InvalidKernel("power-law kernel needs alpha >= 0, gamma > 0, beta > 1");
            scale_ = k.alpha * (k.beta - 1.0) * std::pow(k.gamma, k.beta - 1.0);
          },
          [this](const GammaShape& k) {
            if (!(k.alpha >= 0.0) || !std::isfinite(k.alpha) || !(k.gamma >= 0.0) ||
                !std::isfinite(k.gamma) || !(k.beta > 0.0) || !std::isfinite(k.beta))
              throw InvalidKernel("gamma kernel needs alpha >= 0, gamma >= 0, beta > 0");
            scale_ = k.alpha *
                     std::exp((k.gamma + 1.0) * std::log(k.beta) - std::lgamma(k.gamma + 1.0));
            mode_ = k.gamma / k.beta;
            peak_ = (*this)(mode_);
          },
          [this](const Histogram& h) {
            if (!(h.width > 0.0) || !std::isfinite(h.width))
              throw InvalidKernel("histogram kernel needs width > 0");
            for (double a : h.heights) {
              if (!(a >= 0.0) || !std::isfinite(a))
                throw InvalidKernel("histogram heights must be finite and >= 0");
            }
            suffix_max_.assign(h.heights.size(), 0.0);
            double running = 0.0;
            for (std::size_t i = h.heights.size(); i-- > 0;) {
              running = std::max(running, h.heights[i]);
              suffix_max_[i] = running;
            }
          },
      },
      form_);
}

double Kernel::operator()(double t) const {
  if (t < 0.0) return 0.0;
  return std::visit(
      Overloaded{
          [&](const Exponential& e) { return scale_ * std::exp(-e.beta * t); },
          [&](const PowerLaw& k) { return scale_ * std::pow(t + k.gamma, -k.beta); },
          [&](const GammaShape& k) {
            if (k.gamma == 0.0) return scale_ * std::exp(-k.beta * t);
            if (t == 0.0) return 0.0;
            return scale_ * std::exp(k.gamma * std::log(t) - k.beta * t);
          },
          [&](const Histogram& h) {
            const double bin = std::floor(t / h.width);
            if (bin >= static_cast<double>(h.heights.size())) return 0.0;
            return h.heights[static_cast<std::size_t>(bin)];
          },
      },
      form_);
}

double Kernel::integral() const {
  return std::visit(Overloaded{
                        [](const Exponential& e) { return e.alpha; },
                        [](const PowerLaw& k) { return k.alpha; },
                        [](const GammaShape& k) { return k.alpha; },
                        [](const Histogram& h) {
                          return h.width *
                                 std::accumulate(h.heights.begin(), h.heights.end(), 0.0);
                        },
                    },
                    form_);
}

double Kernel::envelope(double t) const {
  if (t < 0.0) t = 0.0;
  return std::visit(Overloaded{
                        [&](const GammaShape&) { return t < mode_ ? peak_ : (*this)(t); },
                        [&](const Histogram& h) {
                          const double bin = std::floor(t / h.width);
                          if (bin >= static_cast<double>(suffix_max_.size())) return 0.0;
                          return suffix_max_[static_cast<std::size_t>(bin)];
                        },
                        [&](const auto&) { return (*this)(t); },
                    },
                    form_);
}

bool Kernel::sqrt_integrable() const {
  // Only the power law has a polynomial tail: t^(1/2 - beta) is integrable iff beta > 3/2.
  if (const auto* k = std::get_if<PowerLaw>(&form_)) return k->alpha == 0.0 || k->beta > 1.5;
  return true;
}

std::optional<double> Kernel::decay_rate() const {
  return std::visit(Overloaded{
                        [](const Exponential& e) -> std::optional<double> { return e.beta; },
                        [](const PowerLaw&) -> std::optional<double> { return std::nullopt; },
                        [](const GammaShape& k) -> std::optional<double> { return k.beta; },
                        [](const Histogram&) -> std::optional<double> {
                          return std::numeric_limits<double>::infinity();
                        },
                    },
                    form_);
}

Eigen::MatrixXd kernel_integral(const KernelMatrix& phi) {
  const auto p = static_cast<Eigen::Index>(phi.dim());
  Eigen::MatrixXd out(p, p);
  for (Eigen::Index k = 0; k < p; ++k)
    for (Eigen::Index l = 0; l < p; ++l) out(k, l) = phi(k, l).integral();
  return out;
}

Eigen::MatrixXd kernel_envelope(const KernelMatrix& phi, double t) {
  const auto p = static_cast<Eigen::Index>(phi.dim());
  Eigen::MatrixXd out(p, p);
  for (Eigen::Index k = 0; k < p; ++k)
    for (Eigen::Index l = 0; l < p; ++l) out(k, l) = phi(k, l).envelope(t);
  return out;
}

Eigen::MatrixXd kernel_values(const KernelMatrix& phi, double t) {
  const auto p = static_cast<Eigen::Index>(phi.dim());
  Eigen::MatrixXd out(p, p);
  for (Eigen::Index k = 0; k < p; ++k)
    for (Eigen::Index l = 0; l < p; ++l) out(k, l) = phi(k, l)(t);
  return out;
}

bool all_exponential(const KernelMatrix& phi) {
  return std::all_of(phi.begin(), phi.end(),
                     [](const Kernel& k) { return k.as_exponential() != nullptr; });
}

}  // namespace hawkes_ls
