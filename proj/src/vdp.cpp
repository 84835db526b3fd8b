#include "ccbo/vdp.hpp"

#include <algorithm>
#include <cmath>

namespace ccbo::vdp {

int AugmentedDataset::n_virtual() const {
    return static_cast<int>(std::count(is_virtual.begin(), is_virtual.end(), true));
}

VirtualValue virtual_value(double mu, double sigma, double j_min, double j_max, double gamma) {
    if (!(gamma >= 0.0)) throw DomainError("virtual_value: gamma must be >= 0");
    if (!(j_max >= j_min)) throw DomainError("virtual_value: j_max < j_min");
    if (!(sigma >= 0.0)) sigma = 0.0;

    double sigma_used = sigma;
    if (gamma > 0.0) {
        double cap = (j_max - j_min) / gamma;
        while (j_min + gamma * cap > j_max) cap = std::nextafter(cap, 0.0);
        sigma_used = std::min(sigma, cap);
    }
    const double value = std::min(std::max(mu, j_min) + gamma * sigma_used, j_max);
    return {value, sigma_used};
}

AugmentedDataset add_virtual_data(const Trace& history, const Domain& domain,
                                  const gp::GpConfig& config, double gamma, Rng& rng,
                                  const gp::FitSettings& settings) {
    const int d = domain.dim();
    const int n = static_cast<int>(history.evaluations.size());

    std::vector<int> success_rows;
    std::vector<int> crashed_rows;
    for (int i = 0; i < n; ++i) {
        if (history.evaluations[static_cast<std::size_t>(i)].crashed)
            crashed_rows.push_back(i);
        else
            success_rows.push_back(i);
    }
    if (success_rows.empty())
        throw NoFeasibleData("add_virtual_data: no successful evaluations in history");

    AugmentedDataset out;
    out.X.resize(n, d);
    out.y.resize(n);
    out.is_virtual.assign(static_cast<std::size_t>(n), false);
    out.pessimism_sigma = VectorXd::Zero(n);

    for (int i = 0; i < n; ++i)
        out.X.row(i) = normalize(domain, history.evaluations[static_cast<std::size_t>(i)].theta);

    MatrixXd Xs(static_cast<int>(success_rows.size()), d);
    VectorXd ys(static_cast<int>(success_rows.size()));
    for (int k = 0; k < static_cast<int>(success_rows.size()); ++k) {
        const auto& ev = history.evaluations[static_cast<std::size_t>(success_rows[k])];
        Xs.row(k) = out.X.row(success_rows[k]);
        ys[k] = *ev.objective;
        out.y[success_rows[k]] = *ev.objective;
    }

    if (crashed_rows.empty()) return out;

    const double j_min = ys.minCoeff();
    const double j_max = ys.maxCoeff();
    const gp::GpModel inner = gp::fit(Xs, ys, config, rng, settings);

    for (int row : crashed_rows) {
        const gp::Prediction p = gp::predict(inner, out.X.row(row).transpose());
        const VirtualValue v = virtual_value(p.mu, p.sigma, j_min, j_max, gamma);
        out.y[row] = v.value;
        out.is_virtual[static_cast<std::size_t>(row)] = true;
        out.pessimism_sigma[row] = v.sigma_used;
    }
    return out;
}

}  // namespace ccbo::vdp
