#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace loclim {

// Exact rational p/q with q > 0 in lowest terms. Arithmetic throws
// std::overflow_error when an intermediate leaves the int64 range.
class Rational {
 public:
  Rational() = default;
  Rational(std::int64_t num, std::int64_t den = 1);

  std::int64_t num() const noexcept { return num_; }
  std::int64_t den() const noexcept { return den_; }
  double to_double() const noexcept { return static_cast<double>(num_) / static_cast<double>(den_); }
  std::string to_string() const;

  // Accepts "p/q" or an integer literal. Returns nullopt otherwise.
  static std::optional<Rational> parse(std::string_view text);

  friend Rational operator+(const Rational& a, const Rational& b);
  friend Rational operator-(const Rational& a, const Rational& b);
  friend Rational operator*(const Rational& a, const Rational& b);
  friend Rational operator/(const Rational& a, const Rational& b);
  friend bool operator==(const Rational& a, const Rational& b) = default;
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b);

 private:
  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

// A real parameter, optionally known exactly as a rational.
struct Quantity {
  double value = 0.0;
  std::optional<Rational> exact;

  Quantity() = default;
  Quantity(double v) : value(v) {}
  Quantity(const Rational& r) : value(r.to_double()), exact(r) {}

  // "p/q" and integers parse exactly; anything else is read as a double.
  static Quantity parse(std::string_view text);
  std::string to_string() const;
};

}  // namespace loclim
