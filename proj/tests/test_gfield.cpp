#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "systolic/gfield.hpp"

using namespace systolic::gf;

namespace {

// Reference quotient by trying every residue.
std::uint32_t search_div(std::uint32_t a, std::uint32_t b, std::uint32_t p) {
    for (std::uint32_t q = 0; q < p; ++q)
        if ((std::uint64_t{q} * b) % p == a) return q;
    return p;
}

}  // namespace

TEST_CASE("field division examples") {
    CHECK(field_div(FieldElement(1, 2), FieldElement(1, 2)) == FieldElement(1, 2));
    CHECK(field_div(FieldElement(3, 7), FieldElement(5, 7)).value() == 2);
    CHECK(search_div(3, 5, 7) == 2);
    CHECK_THROWS_AS(field_div(FieldElement(4, 7), FieldElement(0, 7)), FieldError);
    CHECK_THROWS_AS(FieldElement(1, 7) + FieldElement(1, 5), FieldError);
}

TEST_CASE("division agrees with search for small primes") {
    for (std::uint32_t p : {2u, 3u, 5u, 7u, 11u, 13u, 17u, 19u, 23u, 29u, 31u}) {
        PrimeField F(p);
        for (std::uint32_t a = 0; a < p; ++a)
            for (std::uint32_t b = 1; b < p; ++b) {
                auto q = field_div(F(a), F(b));
                REQUIRE(q * F(b) == F(a));
                REQUIRE(q.value() == search_div(a, b, p));
            }
    }
}

TEST_CASE("field axioms on random triples") {
    std::mt19937_64 rng(4);
    for (std::uint32_t p : {2u, 7u, 257u, 65537u, 2147483647u}) {
        PrimeField F(p);
        for (int i = 0; i < 2000; ++i) {
            auto a = F(static_cast<std::int64_t>(rng() % p));
            auto b = F(static_cast<std::int64_t>(rng() % p));
            auto c = F(static_cast<std::int64_t>(rng() % p));
            REQUIRE((a + b) + c == a + (b + c));
            REQUIRE((a * b) * c == a * (b * c));
            REQUIRE(a * (b + c) == a * b + a * c);
            REQUIRE(a - a == F.zero());
            REQUIRE(a + (-a) == F.zero());
            if (!a.is_zero()) REQUIRE(a * inverse(a) == F.one());
        }
    }
}

TEST_CASE("prime field construction") {
    CHECK_NOTHROW(PrimeField(2));
    CHECK_NOTHROW(PrimeField(2147483647u));
    CHECK_THROWS_AS(PrimeField(1), FieldError);
    CHECK_THROWS_AS(PrimeField(9), FieldError);
    CHECK_THROWS_AS(PrimeField(4294967291u), FieldError);  // prime but not below 2^31
    CHECK(FieldElement(-1, 7).value() == 6);
}

TEST_CASE("poly normalize") {
    auto z = FieldPoly::normalize({0, 0, 0}, 2);
    CHECK(z.is_zero());
    CHECK(z.degree() == -1);
    auto x1 = FieldPoly::normalize({1, 1, 0}, 2);
    CHECK(x1.degree() == 1);
    CHECK(x1.to_string() == "1,1 mod 2");
    auto r = FieldPoly::normalize({6, 5 + 2, 1}, 7);
    CHECK(r.degree() == 2);
    CHECK(r.coeff(1).value() == 0);
    CHECK(r.to_string() == "6,0,1 mod 7");
}

TEST_CASE("poly text form") {
    auto a = FieldPoly::parse("6,5,1 mod 7");
    CHECK(a.modulus() == 7);
    CHECK(a.degree() == 2);
    CHECK(FieldPoly::parse(a.to_string()) == a);
    CHECK(FieldPoly::parse("1, 0, 1", 2).to_string() == "1,0,1 mod 2");
    CHECK(FieldPoly::parse("0 mod 5").is_zero());
    CHECK(FieldPoly::parse("0 mod 5").to_string() == "0 mod 5");
    CHECK_THROWS_AS(FieldPoly::parse("1,2 mod 8"), FieldError);
    CHECK_THROWS_AS(FieldPoly::parse("1,2 mod 5", 7), FieldError);
    CHECK_THROWS_AS(FieldPoly::parse("1,x mod 5"), FieldError);
    CHECK_THROWS_AS(FieldPoly::parse("", 5), FieldError);
}

TEST_CASE("poly arithmetic") {
    const std::uint32_t p = 7;
    auto xp2 = FieldPoly::normalize({2, 1}, p);
    auto xp3 = FieldPoly::normalize({3, 1}, p);
    auto prod = xp2 * xp3;
    CHECK(prod == FieldPoly::normalize({6, 5, 1}, p));
    auto d = divmod(prod, xp2);
    CHECK(d.quotient == xp3);
    CHECK(d.remainder.is_zero());
    CHECK_THROWS_AS(divmod(prod, FieldPoly(p)), FieldError);

    std::mt19937_64 rng(8);
    for (int i = 0; i < 300; ++i) {
        std::vector<std::int64_t> ra(rng() % 12), rb(1 + rng() % 8);
        for (auto& v : ra) v = static_cast<std::int64_t>(rng() % p);
        for (auto& v : rb) v = static_cast<std::int64_t>(rng() % p);
        rb.back() = 1 + static_cast<std::int64_t>(rng() % (p - 1));
        auto A = FieldPoly::normalize(ra, p), B = FieldPoly::normalize(rb, p);
        auto [q, r] = divmod(A, B);
        REQUIRE(q * B + r == A);
        REQUIRE(r.degree() < B.degree());
        REQUIRE((A + B) - B == A);
    }
}

TEST_CASE("monic and x powers") {
    auto a = FieldPoly::normalize({0, 0, 3, 6}, 7);
    CHECK(a.x_valuation() == 2);
    CHECK(a.shift_down(2) == FieldPoly::normalize({3, 6}, 7));
    CHECK(a.shift_down(2).shift_up(2) == a);
    CHECK(a.monic().lead().value() == 1);
    CHECK(a.monic() == FieldPoly::normalize({0, 0, 4, 1}, 7));
    CHECK(FieldPoly::monomial(FieldElement(3, 7), 2) == FieldPoly::normalize({0, 0, 3}, 7));
    CHECK(FieldPoly(7).x_valuation() == 0);
}
