#pragma once

#include <cmath>
#include <compare>
#include <limits>
#include <ostream>

#include "autoconj/error.hpp"

namespace autoconj {

/// A value in R ∪ {+inf}.
///
/// The infinite element is stored as the IEEE +infinity, which is a distinct
/// tagged value rather than a large finite sentinel: it absorbs addition and
/// positive scaling exactly. -inf and NaN are not representable; any operation
/// that would produce them (0·inf, inf − inf, negative scaling of inf) throws.
class ExtReal {
public:
    constexpr ExtReal() = default;

    ExtReal(double v) : v_(v) { // NOLINT: implicit on purpose, reals embed in ExtReal
        if (std::isnan(v) || v == -std::numeric_limits<double>::infinity())
            throw std::domain_error("ExtReal: value must be a real number or +inf");
    }

    static constexpr ExtReal infinity() { return ExtReal(Raw{}, std::numeric_limits<double>::infinity()); }

    bool is_finite() const { return v_ != std::numeric_limits<double>::infinity(); }
    bool is_infinite() const { return !is_finite(); }

    /// The finite value; throws on +inf.
    double value() const {
        if (!is_finite()) throw std::domain_error("ExtReal: value() of +inf");
        return v_;
    }

    /// IEEE view (+inf maps to std::numeric_limits<double>::infinity()).
    constexpr double raw() const { return v_; }

    friend ExtReal operator+(ExtReal a, ExtReal b) { return ExtReal(Raw{}, a.v_ + b.v_); }

    friend ExtReal operator-(ExtReal a, double b) {
        if (!std::isfinite(b)) throw std::domain_error("ExtReal: subtracting a non-finite value");
        return ExtReal(Raw{}, a.v_ - b);
    }

    friend ExtReal operator*(double c, ExtReal a) {
        if (std::isnan(c) || std::isinf(c)) throw std::domain_error("ExtReal: scale must be finite");
        if (a.is_infinite()) {
            if (c == 0.0) throw std::domain_error("ExtReal: 0 * inf is undefined");
            if (c < 0.0) throw std::domain_error("ExtReal: negative multiple of +inf");
            return a;
        }
        return ExtReal(Raw{}, c * a.v_);
    }
    friend ExtReal operator*(ExtReal a, double c) { return c * a; }

    friend bool operator==(ExtReal a, ExtReal b) { return a.v_ == b.v_; }
    friend std::partial_ordering operator<=>(ExtReal a, ExtReal b) { return a.v_ <=> b.v_; }

    friend std::ostream& operator<<(std::ostream& os, ExtReal a) {
        if (a.is_infinite()) return os << "inf";
        return os << a.v_;
    }

private:
    struct Raw {};
    constexpr ExtReal(Raw, double v) : v_(v) {}

    double v_ = 0.0;
};

inline constexpr double kInf = std::numeric_limits<double>::infinity();

} // namespace autoconj
