#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace systolic::gf {

struct FieldError : std::domain_error {
    using std::domain_error::domain_error;
};

/// Residue modulo a prime p < 2^31. A default-constructed element has
/// modulus 0 and only serves as a placeholder.
class FieldElement {
public:
    FieldElement() = default;
    /// Reduces `value` into [0, p). Does not check that p is prime; use
    /// PrimeField for validated construction.
    FieldElement(std::int64_t value, std::uint32_t p);

    std::uint32_t value() const { return v_; }
    std::uint32_t modulus() const { return p_; }
    bool is_zero() const { return v_ == 0; }

    friend bool operator==(const FieldElement&, const FieldElement&) = default;

private:
    std::uint32_t v_ = 0;
    std::uint32_t p_ = 0;
};

FieldElement operator+(FieldElement a, FieldElement b);
FieldElement operator-(FieldElement a, FieldElement b);
FieldElement operator-(FieldElement a);
FieldElement operator*(FieldElement a, FieldElement b);
FieldElement inverse(FieldElement a);
FieldElement field_div(FieldElement a, FieldElement b);

bool is_prime(std::uint64_t p);

/// GF(p) for a checked prime p, 2 <= p < 2^31.
class PrimeField {
public:
    explicit PrimeField(std::uint32_t p);
    std::uint32_t modulus() const { return p_; }
    FieldElement operator()(std::int64_t v) const { return FieldElement(v, p_); }
    FieldElement zero() const { return FieldElement(0, p_); }
    FieldElement one() const { return FieldElement(1, p_); }

private:
    std::uint32_t p_;
};

/// Polynomial over GF(p), lowest degree first. The zero polynomial has no
/// coefficients and degree -1.
class FieldPoly {
public:
    explicit FieldPoly(std::uint32_t p = 2) : p_(p) {}
    FieldPoly(std::vector<FieldElement> coeffs, std::uint32_t p);

    /// Reduces raw integers mod p and strips trailing zeros.
    static FieldPoly normalize(const std::vector<std::int64_t>& raw, std::uint32_t p);
    static FieldPoly monomial(FieldElement c, int degree);

    int degree() const { return static_cast<int>(c_.size()) - 1; }
    bool is_zero() const { return c_.empty(); }
    std::uint32_t modulus() const { return p_; }
    const std::vector<FieldElement>& coeffs() const { return c_; }
    /// Coefficient of x^i; zero outside the stored range.
    FieldElement coeff(int i) const;
    FieldElement lead() const;

    FieldPoly monic() const;
    /// Largest e with x^e dividing this polynomial (0 for the zero polynomial).
    int x_valuation() const;
    FieldPoly shift_down(int e) const;
    FieldPoly shift_up(int e) const;

    std::string to_string() const;
    /// Parses "c0,c1,...[ mod p]"; the suffix must match p when present.
    static FieldPoly parse(std::string_view text, std::uint32_t p);
    /// Parses "c0,c1,... mod p", taking p from the suffix.
    static FieldPoly parse(std::string_view text);

    friend bool operator==(const FieldPoly&, const FieldPoly&) = default;

private:
    void trim();
    std::vector<FieldElement> c_;
    std::uint32_t p_;
};

FieldPoly operator+(const FieldPoly& a, const FieldPoly& b);
FieldPoly operator-(const FieldPoly& a, const FieldPoly& b);
FieldPoly operator*(const FieldPoly& a, const FieldPoly& b);
FieldPoly scale(const FieldPoly& a, FieldElement c);

struct PolyDivision {
    FieldPoly quotient;
    FieldPoly remainder;
};
PolyDivision divmod(const FieldPoly& a, const FieldPoly& b);

}  // namespace systolic::gf
