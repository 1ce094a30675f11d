#pragma once

#include <cstdint>
#include <stdexcept>

namespace gnnsim {

/// Exact rational number used for virtual time (seconds) in the scheduler,
/// so long schedules accumulate no float drift. Denominators stay small
/// because every quantity is cycles/frequency or bytes*k/bandwidth with a
/// handful of integer frequencies.
class Rational {
public:
    Rational() : num_(0), den_(1) {}
    Rational(std::int64_t num, std::int64_t den) : num_(num), den_(den) { normalize(); }

    static Rational from_int(std::int64_t v) { return Rational(v, 1); }

    double to_double() const {
        return static_cast<double>(num_) / static_cast<double>(den_);
    }

    bool is_zero() const { return num_ == 0; }

    Rational operator+(const Rational& o) const {
        return make(num_ * o.den_ + o.num_ * den_, den_ * o.den_);
    }
    Rational operator-(const Rational& o) const {
        return make(num_ * o.den_ - o.num_ * den_, den_ * o.den_);
    }
    Rational operator*(const Rational& o) const { return make(num_ * o.num_, den_ * o.den_); }
    Rational operator/(const Rational& o) const {
        if (o.num_ == 0) throw std::domain_error("Rational: division by zero");
        return make(num_ * o.den_, den_ * o.num_);
    }

    bool operator==(const Rational& o) const {
        return num_ * o.den_ == o.num_ * den_;
    }
    bool operator<(const Rational& o) const {
        return num_ * o.den_ < o.num_ * den_;
    }
    bool operator<=(const Rational& o) const { return *this < o || *this == o; }
    bool operator>(const Rational& o) const { return o < *this; }
    bool operator>=(const Rational& o) const { return o <= *this; }

private:
    using int128 = __int128;

    Rational(int128 num, int128 den, int) : num_(num), den_(den) { normalize(); }

    static Rational make(int128 num, int128 den) { return Rational(num, den, 0); }

    static int128 gcd128(int128 a, int128 b) {
        if (a < 0) a = -a;
        if (b < 0) b = -b;
        while (b != 0) {
            int128 t = a % b;
            a = b;
            b = t;
        }
        return a;
    }

    void normalize() {
        if (den_ == 0) throw std::domain_error("Rational: zero denominator");
        if (den_ < 0) {
            num_ = -num_;
            den_ = -den_;
        }
        int128 g = gcd128(num_, den_);
        if (g > 1) {
            num_ /= g;
            den_ /= g;
        }
    }

    int128 num_;
    int128 den_;
};

}  // namespace gnnsim
