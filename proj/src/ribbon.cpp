#include "ness/ribbon.hpp"

#include <cmath>
#include <map>
#include <numbers>
#include <sstream>

namespace ness {

namespace {

void validate_hoppings(const std::vector<Hopping>& hoppings, int d, const char* name, const ToleranceConfig& tol) {
    std::map<int, const Matrix*> by_range;
    for (const Hopping& hop : hoppings) {
        if (hop.t.rows() != d || hop.t.cols() != d) {
            std::ostringstream os;
            os << name << ": hopping r=" << hop.r << " is " << hop.t.rows() << "x" << hop.t.cols() << ", expected "
               << d << "x" << d;
            throw Error(ErrorCode::InvalidHopping, os.str());
        }
        if (!by_range.emplace(hop.r, &hop.t).second) {
            std::ostringstream os;
            os << name << ": duplicate hopping r=" << hop.r;
            throw Error(ErrorCode::InvalidHopping, os.str());
        }
    }
    for (const auto& [r, t] : by_range) {
        const auto partner = by_range.find(-r);
        if (partner == by_range.end()) {
            std::ostringstream os;
            os << name << ": hopping r=" << r << " has no partner r=" << -r;
            throw Error(ErrorCode::InvalidHopping, os.str());
        }
        const double scale = std::max(t->cwiseAbs().maxCoeff(), partner->second->cwiseAbs().maxCoeff());
        const double dev = (*partner->second - t->adjoint()).cwiseAbs().maxCoeff();
        if (dev > tol.hermitian * scale) {
            std::ostringstream os;
            os << name << ": T_{" << -r << "} differs from T_{" << r << "}^dag by " << dev;
            throw Error(ErrorCode::InvalidHopping, os.str());
        }
    }
}

}  // namespace

void RibbonSpec::validate(const ToleranceConfig& tol) const {
    if (d < 1) throw Error(ErrorCode::InvalidArgument, "ribbon width d must be >= 1");
    if (n_k < 4 || n_k % 2 != 0) {
        throw Error(ErrorCode::InvalidArgument, "n_k must be an even integer >= 4");
    }
    validate_hoppings(hoppings_h, d, "H", tol);
    validate_hoppings(hoppings_a, d, "A", tol);
    validate_hoppings(hoppings_d, d, "D", tol);
}

RibbonSpec RibbonSpec::with_nodes(int n) const {
    RibbonSpec copy = *this;
    copy.n_k = n;
    return copy;
}

std::vector<double> quadrature_nodes(int n_k) {
    std::vector<double> xs(static_cast<std::size_t>(n_k));
    for (int j = 0; j < n_k; ++j) xs[static_cast<std::size_t>(j)] = 2.0 * std::numbers::pi * j / n_k;
    return xs;
}

double pairwise_sum(const double* values, std::size_t n) {
    if (n == 0) return 0.0;
    if (n <= 8) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += values[i];
        return s;
    }
    const std::size_t half = n / 2;
    return pairwise_sum(values, half) + pairwise_sum(values + half, n - half);
}

Matrix symbol_sum(const std::vector<Hopping>& hoppings, int d, double x) {
    Matrix out = Matrix::Zero(d, d);
    for (const Hopping& hop : hoppings) {
        const double phase = hop.r * x;
        out += hop.t * Complex(std::cos(phase), std::sin(phase));
    }
    return out;
}

RibbonSymbols eval_symbol(const RibbonSpec& spec, double x, const ToleranceConfig& tol) {
    if (!(x >= 0.0 && x < 2.0 * std::numbers::pi)) {
        throw Error(ErrorCode::InvalidArgument, "momentum x must lie in [0, 2pi)");
    }
    auto as_psd = [&](const std::vector<Hopping>& hops, const char* name) {
        try {
            return validate_psd(symbol_sum(hops, spec.d, x), tol);
        } catch (const Error& e) {
            std::ostringstream os;
            os << name << "(x=" << x << "): " << e.what();
            throw Error(ErrorCode::SymbolNotPsd, os.str());
        }
    };
    return RibbonSymbols{HermitianMatrix::from_trusted(symbol_sum(spec.hoppings_h, spec.d, x)),
                         as_psd(spec.hoppings_a, "A"), as_psd(spec.hoppings_d, "D")};
}

CovarianceMatrix ribbon_ness_symbol(const RibbonSpec& spec, double x, const ToleranceConfig& tol) {
    const RibbonSymbols s = eval_symbol(spec, x, tol);
    try {
        return {solve_damped_fixed_point(s.a + s.d, s.h, s.a, tol)};
    } catch (const Error& e) {
        std::ostringstream os;
        os << "at x=" << x << ": " << e.what();
        throw Error(e.code(), os.str());
    }
}

double observable_density(const RibbonSpec& spec, const Symbol& x_hat, const Symbol& q_hat) {
    const std::vector<double> xs = quadrature_nodes(spec.n_k);
    std::vector<double> terms(xs.size());
    for (std::size_t j = 0; j < xs.size(); ++j) {
        terms[j] = (x_hat(xs[j]) * q_hat(xs[j])).trace().real();
    }
    return pairwise_sum(terms.data(), terms.size()) / spec.n_k;
}

double particle_density(const RibbonSpec& spec, const ToleranceConfig& tol) {
    return current_density(spec, tol).rho;
}

RibbonReport current_density(const RibbonSpec& spec, const ToleranceConfig& tol) {
    spec.validate(tol);
    const std::vector<double> xs = quadrature_nodes(spec.n_k);
    const std::size_t n = xs.size();

    RibbonReport report;
    report.per_k_records.resize(n);
    std::vector<double> tr_dq(n), bound_terms(n), tr_q(n);
    for (std::size_t j = 0; j < n; ++j) {
        const RibbonSymbols s = eval_symbol(spec, xs[j], tol);
        const CovarianceMatrix q = ribbon_ness_symbol(spec, xs[j], tol);
        const Matrix one_minus_q = Matrix::Identity(spec.d, spec.d) - q.matrix();
        const double ta = s.a.trace();
        const double td = s.d.trace();

        RibbonNodeRecord& rec = report.per_k_records[j];
        rec.x = xs[j];
        rec.tr_dq = (s.d.matrix() * q.matrix()).trace().real();
        rec.tr_a_one_minus_q = (s.a.matrix() * one_minus_q).trace().real();
        rec.local_bound = ta + td > 0.0 ? ta * td / (ta + td) : 0.0;

        tr_dq[j] = rec.tr_dq;
        bound_terms[j] = rec.local_bound;
        tr_q[j] = q.matrix().trace().real();
    }
    // (1/πd)∫dx → (1/πd)(2π/n)Σ = 2/(d n) Σ
    const double weight = 2.0 / (static_cast<double>(spec.d) * static_cast<double>(n));
    report.j_density = weight * pairwise_sum(tr_dq.data(), n);
    report.j_density_bound = weight * pairwise_sum(bound_terms.data(), n);
    report.rho = pairwise_sum(tr_q.data(), n) / (static_cast<double>(spec.d) * static_cast<double>(n));
    return report;
}

RibbonSpec sample_ribbon(int d, int range, int n_k, RngStream& rng, double onsite_offset) {
    if (d < 1 || range < 0) throw Error(ErrorCode::InvalidArgument, "sample_ribbon needs d >= 1, range >= 0");
    auto gaussian = [&](double scale) {
        Matrix t(d, d);
        for (int j = 0; j < d; ++j) {
            for (int i = 0; i < d; ++i) t(i, j) = Complex(rng.normal(), rng.normal()) * scale;
        }
        return t;
    };

    RibbonSpec spec;
    spec.d = d;
    spec.n_k = n_k;

    // Hamiltonian: Hermitian on-site block plus decaying hoppings.
    const Matrix h0 = gaussian(1.0 / std::sqrt(2.0 * d));
    spec.hoppings_h.push_back({0, (h0 + h0.adjoint()) * 0.5});
    for (int r = 1; r <= range; ++r) {
        const Matrix t = gaussian(0.5 / (r * std::sqrt(2.0 * d)));
        spec.hoppings_h.push_back({r, t});
        spec.hoppings_h.push_back({-r, t.adjoint()});
    }

    // Rates: B̂(x) = Σ_{s=0}^{range} b_s e^{isx}; B̂†B̂ has coefficients Σ_{s-r=q} b_r† b_s.
    auto psd_symbol = [&]() {
        std::vector<Matrix> b;
        for (int s = 0; s <= range; ++s) b.push_back(gaussian(1.0 / std::sqrt(2.0 * d * (range + 1) * (s + 1))));
        std::vector<Hopping> hops;
        for (int q = -range; q <= range; ++q) {
            Matrix t = Matrix::Zero(d, d);
            for (int r = 0; r <= range; ++r) {
                const int s = r + q;
                if (s >= 0 && s <= range) t += b[static_cast<std::size_t>(r)].adjoint() * b[static_cast<std::size_t>(s)];
            }
            if (q == 0) t = (t + t.adjoint()) * 0.5 + onsite_offset * Matrix::Identity(d, d);
            hops.push_back({q, t});
        }
        // Make T_{-q} exactly T_q† so validation never trips on rounding.
        for (Hopping& hop : hops) {
            if (hop.r < 0) hop.t = hops[static_cast<std::size_t>(range - hop.r)].t.adjoint();
        }
        return hops;
    };
    spec.hoppings_a = psd_symbol();
    spec.hoppings_d = psd_symbol();
    return spec;
}

}  // namespace ness
