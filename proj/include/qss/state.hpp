// state.hpp
// Exact-phase qudit state vectors, the cyclic MUB family, the diagonal
// phase gates acting on it, and projective measurement.

#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <vector>

#include "modular.hpp"
#include "random.hpp"

namespace qss {

using Complex = std::complex<double>;

// omega^e with omega = e^{2*pi*i/d}; exponent reduced mod d before the
// trig call so the argument stays bounded.
inline Complex omega_pow(int d, long long e) {
    const int r = ModInt::reduce(e, d);
    const double theta = 2.0 * std::numbers::pi * r / d;
    return {std::cos(theta), std::sin(theta)};
}

// Label (l, j) of the MUB element M_{l,j}: vector l of basis j.
struct MubLabel {
    ModInt l;
    ModInt j;

    friend bool operator==(const MubLabel& a, const MubLabel& b) {
        return a.l == b.l && a.j == b.j;
    }
};

// Exponents of the diagonal unitary X^x Y^y. Composition adds exponents
// mod d, so these form the cyclic group acting on the MUB family.
struct PhaseGate {
    ModInt x;
    ModInt y;

    PhaseGate compose(const PhaseGate& o) const { return {x + o.x, y + o.y}; }
};

// Unit vector of d complex amplitudes. The amplitude vector is the
// ground truth; MUB labels are a derived view.
class QuditState {
public:
    explicit QuditState(std::vector<Complex> amplitudes)
        : amp_(std::move(amplitudes)) {
        if (amp_.empty()) throw std::invalid_argument("empty amplitude vector");
        double n2 = 0.0;
        for (const auto& a : amp_) n2 += std::norm(a);
        if (std::abs(n2 - 1.0) > 1e-9)
            throw std::invalid_argument("state is not unit norm");
    }

    int dim() const { return (int)amp_.size(); }
    const std::vector<Complex>& amplitudes() const { return amp_; }
    Complex amplitude(int k) const { return amp_[(size_t)k]; }

    // Computational basis state |k>. The protocol itself never prepares
    // these; they exist for tests and adversary models.
    static QuditState computational(Dimension d, int k) {
        std::vector<Complex> a((size_t)d.value(), Complex{0.0, 0.0});
        a[(size_t)ModInt::reduce(k, d.value())] = Complex{1.0, 0.0};
        return QuditState(std::move(a));
    }

private:
    std::vector<Complex> amp_;
};

// (1/sqrt(d)) sum_k omega^{k(l + j k)} |k>.
inline QuditState mub_vector(Dimension d, const MubLabel& label) {
    const int dd = d.value();
    if (label.l.modulus() != d || label.j.modulus() != d)
        throw std::invalid_argument("label modulus does not match dimension");
    const double norm = 1.0 / std::sqrt((double)dd);
    std::vector<Complex> amp((size_t)dd);
    for (int k = 0; k < dd; ++k) {
        const long long e =
            (long long)k * (label.l.value() + (long long)label.j.value() * k);
        amp[(size_t)k] = norm * omega_pow(dd, e);
    }
    return QuditState(std::move(amp));
}

// Multiplies amplitude k by omega^{x k + y k^2}; sends M_{l,j} to
// M_{l+x, j+y}.
inline QuditState apply_gate(const QuditState& state, const PhaseGate& gate) {
    const int d = gate.x.modulus().value();
    if (state.dim() != d)
        throw std::invalid_argument("state dimension does not match gate modulus");
    std::vector<Complex> amp(state.amplitudes());
    for (int k = 0; k < d; ++k) {
        const long long e =
            (long long)gate.x.value() * k + (long long)gate.y.value() * k * k;
        amp[(size_t)k] *= omega_pow(d, e);
    }
    return QuditState(std::move(amp));
}

// |<a|b>|^2.
inline double overlap_sq(const QuditState& a, const QuditState& b) {
    if (a.dim() != b.dim()) throw std::invalid_argument("dimension mismatch");
    Complex ip{0.0, 0.0};
    for (int k = 0; k < a.dim(); ++k)
        ip += std::conj(a.amplitude(k)) * b.amplitude(k);
    return std::norm(ip);
}

// The unique MUB label matching the state up to a global phase, or
// nullopt. Wrong labels score 1/d, so any tol well above machine noise
// and below 1 - 1/d discriminates.
inline std::optional<MubLabel> classify(const QuditState& state,
                                        double tol = 1e-9) {
    const Dimension d(state.dim());
    for (int j = 0; j < d.value(); ++j)
        for (int l = 0; l < d.value(); ++l) {
            MubLabel label{ModInt(l, d), ModInt(j, d)};
            if (overlap_sq(state, mub_vector(d, label)) >= 1.0 - tol)
                return label;
        }
    return std::nullopt;
}

struct MeasurementResult {
    ModInt outcome;
    QuditState post_state;
};

// Projective measurement in MUB basis j: samples l with Born probability
// |<e_l^{(j)}|state>|^2 and collapses onto that basis vector.
inline MeasurementResult measure_in_basis(const QuditState& state, ModInt j,
                                          RandomSource& rng) {
    const Dimension d = j.modulus();
    if (state.dim() != d.value())
        throw std::invalid_argument("state dimension does not match basis modulus");
    const double u = uniform_unit(rng);
    double cum = 0.0;
    int picked = d.value() - 1;
    for (int l = 0; l < d.value(); ++l) {
        cum += overlap_sq(state, mub_vector(d, {ModInt(l, d), j}));
        if (u < cum) { picked = l; break; }
    }
    ModInt outcome(picked, d);
    return {outcome, mub_vector(d, {outcome, j})};
}

}  // namespace qss
