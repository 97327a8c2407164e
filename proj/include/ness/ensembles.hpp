#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

#include "ness/system.hpp"

namespace ness {

/// Seeded 64-bit Mersenne Twister. Each (seed, stream) pair gives an
/// independent sequence, so realization k of a sweep always draws from
/// stream k regardless of how many realizations are run or in which order.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed, std::uint64_t stream = 0);

    double normal() { return normal_(engine_); }
    double uniform(double lo, double hi) { return lo + (hi - lo) * unit_(engine_); }
    std::mt19937_64& engine() noexcept { return engine_; }

private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
    std::uniform_real_distribution<double> unit_{0.0, 1.0};
};

/// How the second argument of Normal(0, (1+δ_ij) v/√m) is read.
enum class GoeConvention {
    /// Var(H_ij) = (1+δ_ij) v²/m; spectral radius → 2v.
    variance,
    /// Std(H_ij) = (1+δ_ij) v/√m, the formula taken literally.
    literal_std,
};

std::string_view to_string(GoeConvention c) noexcept;
GoeConvention goe_convention_from_string(std::string_view s);

enum class EnsembleKind { goe, wishart, haar, designed };

std::string_view to_string(EnsembleKind k) noexcept;
EnsembleKind ensemble_kind_from_string(std::string_view s);

struct EnsembleConfig {
    int m = 10;
    double v = 1.0;
    int m_A = 5;
    int m_D = 10;
    int m_P = 10;
    /// Designed-system energies are drawn from Uniform[-halfwidth, halfwidth];
    /// non-positive means the default m/2.
    double energy_halfwidth = 0.0;
    std::uint64_t seed = 0;
    EnsembleKind kind = EnsembleKind::goe;
    GoeConvention goe_convention = GoeConvention::variance;

    double halfwidth() const { return energy_halfwidth > 0.0 ? energy_halfwidth : 0.5 * m; }
    void validate() const;
};

HermitianMatrix sample_goe(int m, double v, RngStream& rng, GoeConvention convention = GoeConvention::variance);

/// W†W / normalizer with W an m_ch × m matrix of independent standard normals.
PsdMatrix sample_wishart_channel(int m, int m_ch, int normalizer, RngStream& rng);

/// QR of a complex Ginibre matrix with R's diagonal rotated to the positive reals.
Matrix sample_haar_unitary(int m, RngStream& rng);

struct DesignedSystem {
    SystemSpec spec;
    Matrix u;
    std::vector<double> energies;  // paired with the columns of unitary_eigenbasis(u)
    double commutator_norm = 0.0;
};

/// Haar U, H diagonal in U's eigenbasis with Uniform[-halfwidth, halfwidth]
/// energies, A Wishart with normalizer 2·m_A, and D = U†AU. Redraws when
/// energies or eigenphases collide.
DesignedSystem build_designed_system(int m, int m_A, double energy_halfwidth, RngStream& rng,
                                     const ToleranceConfig& tol = default_tolerances());

/// Same construction with a caller-fixed absorption matrix.
DesignedSystem build_designed_system(const PsdMatrix& a, double energy_halfwidth, RngStream& rng,
                                     const ToleranceConfig& tol = default_tolerances());

}  // namespace ness
