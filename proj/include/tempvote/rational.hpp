#pragma once

#include <compare>
#include <cstdint>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>

namespace tempvote {

/*
 * Exact rational number over 64-bit integers.
 *
 * Always kept in lowest terms with a positive denominator. Intermediate
 * products are formed in 128 bits; a result that does not fit back into
 * 64 bits throws std::overflow_error instead of wrapping.
 */
class Rational {
public:
        using int_type = std::int64_t;

        constexpr Rational() = default;
        constexpr Rational(int_type value) : num_(value) {} // NOLINT(implicit)
        Rational(int_type num, int_type den) { assign(num, den); }

        [[nodiscard]] constexpr int_type num() const { return num_; }
        [[nodiscard]] constexpr int_type den() const { return den_; }

        [[nodiscard]] constexpr bool is_zero() const { return num_ == 0; }
        [[nodiscard]] constexpr bool is_integer() const { return den_ == 1; }

        /// Largest integer not greater than the value.
        [[nodiscard]] int_type floor() const {
                int_type q = num_ / den_;
                if (num_ % den_ != 0 && num_ < 0)
                        --q;
                return q;
        }

        friend Rational operator+(const Rational& a, const Rational& b) {
                return from_wide(wide(a.num_) * b.den_ + wide(b.num_) * a.den_,
                                 wide(a.den_) * b.den_);
        }
        friend Rational operator-(const Rational& a, const Rational& b) {
                return from_wide(wide(a.num_) * b.den_ - wide(b.num_) * a.den_,
                                 wide(a.den_) * b.den_);
        }
        friend Rational operator*(const Rational& a, const Rational& b) {
                return from_wide(wide(a.num_) * b.num_, wide(a.den_) * b.den_);
        }
        friend Rational operator/(const Rational& a, const Rational& b) {
                if (b.num_ == 0)
                        throw std::domain_error("rational division by zero");
                return from_wide(wide(a.num_) * b.den_, wide(a.den_) * b.num_);
        }
        Rational operator-() const { return from_wide(-wide(num_), den_); }

        Rational& operator+=(const Rational& o) { return *this = *this + o; }
        Rational& operator-=(const Rational& o) { return *this = *this - o; }
        Rational& operator*=(const Rational& o) { return *this = *this * o; }
        Rational& operator/=(const Rational& o) { return *this = *this / o; }

        friend bool operator==(const Rational&, const Rational&) = default;
        friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
                return wide(a.num_) * b.den_ <=> wide(b.num_) * a.den_;
        }

        /// "num/den", also for integers ("3/1").
        [[nodiscard]] std::string to_string() const {
                return std::to_string(num_) + "/" + std::to_string(den_);
        }

        /// Accepts "a/b" or a bare integer "a".
        static Rational parse(std::string_view text) {
                auto to_int = [&](std::string_view s) {
                        if (s.empty())
                                throw std::invalid_argument("malformed rational: '" + std::string(text) + "'");
                        std::size_t pos = 0;
                        long long v = 0;
                        try {
                                v = std::stoll(std::string(s), &pos);
                        } catch (const std::exception&) {
                                throw std::invalid_argument("malformed rational: '" + std::string(text) + "'");
                        }
                        if (pos != s.size())
                                throw std::invalid_argument("malformed rational: '" + std::string(text) + "'");
                        return static_cast<int_type>(v);
                };
                auto slash = text.find('/');
                if (slash == std::string_view::npos)
                        return Rational(to_int(text));
                int_type den = to_int(text.substr(slash + 1));
                if (den == 0)
                        throw std::invalid_argument("rational with zero denominator: '" + std::string(text) + "'");
                return Rational(to_int(text.substr(0, slash)), den);
        }

        friend std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.to_string(); }

private:
        using wide_type = __int128;

        static constexpr wide_type wide(int_type v) { return v; }

        static wide_type wide_gcd(wide_type a, wide_type b) {
                if (a < 0) a = -a;
                if (b < 0) b = -b;
                while (b != 0) {
                        wide_type t = a % b;
                        a = b;
                        b = t;
                }
                return a;
        }

        static Rational from_wide(wide_type num, wide_type den) {
                if (den == 0)
                        throw std::domain_error("rational with zero denominator");
                if (den < 0) {
                        num = -num;
                        den = -den;
                }
                wide_type g = wide_gcd(num, den);
                if (g > 1) {
                        num /= g;
                        den /= g;
                }
                constexpr wide_type lo = INT64_MIN, hi = INT64_MAX;
                if (num < lo || num > hi || den > hi)
                        throw std::overflow_error("rational overflow");
                Rational r;
                r.num_ = static_cast<int_type>(num);
                r.den_ = static_cast<int_type>(den);
                return r;
        }

        void assign(int_type num, int_type den) { *this = from_wide(num, den); }

        int_type num_ = 0;
        int_type den_ = 1;
};

inline Rational max(const Rational& a, const Rational& b) { return a < b ? b : a; }
inline Rational min(const Rational& a, const Rational& b) { return b < a ? b : a; }

} // namespace tempvote
