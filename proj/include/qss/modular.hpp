// modular.hpp
// Odd-prime dimension tag and mod-d residue arithmetic.

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace qss {

// Dimension of the qudit carrier. Restricted to odd primes; the cyclic
// MUB structure the protocol relies on only exists there.
class Dimension {
public:
    explicit Dimension(int d) : d_(d) {
        if (d < 3 || !is_odd_prime(d))
            throw std::invalid_argument("dimension must be an odd prime, got " +
                                        std::to_string(d));
    }

    int value() const { return d_; }

    friend bool operator==(Dimension a, Dimension b) { return a.d_ == b.d_; }
    friend bool operator!=(Dimension a, Dimension b) { return a.d_ != b.d_; }

    static bool is_odd_prime(int n) {
        if (n < 3 || n % 2 == 0) return false;
        for (int f = 3; f * f <= n; f += 2)
            if (n % f == 0) return false;
        return true;
    }

private:
    int d_;
};

// Residue in {0,...,d-1}. All protocol indices (l, j, gate exponents,
// outcomes) live here.
class ModInt {
public:
    ModInt(long long v, Dimension d) : d_(d), v_(reduce(v, d.value())) {}

    int value() const { return v_; }
    Dimension modulus() const { return d_; }

    ModInt operator+(ModInt o) const { check(o); return {v_ + (long long)o.v_, d_}; }
    ModInt operator-(ModInt o) const { check(o); return {v_ - (long long)o.v_, d_}; }
    ModInt operator*(ModInt o) const { check(o); return {(long long)v_ * o.v_, d_}; }
    ModInt operator-() const { return {-(long long)v_, d_}; }

    friend bool operator==(ModInt a, ModInt b) {
        return a.d_ == b.d_ && a.v_ == b.v_;
    }
    friend bool operator!=(ModInt a, ModInt b) { return !(a == b); }

    static int reduce(long long v, int d) {
        long long r = v % d;
        return (int)(r < 0 ? r + d : r);
    }

private:
    void check(ModInt o) const {
        if (d_ != o.d_) throw std::invalid_argument("modulus mismatch");
    }

    Dimension d_;
    int v_;
};

}  // namespace qss
