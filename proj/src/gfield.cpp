#include "systolic/gfield.hpp"

#include <charconv>
#include <sstream>

namespace systolic::gf {

namespace {

void same_modulus(FieldElement a, FieldElement b) {
    if (a.modulus() != b.modulus())
        throw FieldError("field elements have different moduli");
}

std::string_view trim_ws(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\n' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

std::int64_t parse_int(std::string_view s) {
    s = trim_ws(s);
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
        throw FieldError("bad integer '" + std::string(s) + "'");
    return v;
}

}  // namespace

FieldElement::FieldElement(std::int64_t value, std::uint32_t p) : p_(p) {
    if (p == 0) throw FieldError("modulus must be positive");
    std::int64_t r = value % static_cast<std::int64_t>(p);
    if (r < 0) r += p;
    v_ = static_cast<std::uint32_t>(r);
}

FieldElement operator+(FieldElement a, FieldElement b) {
    same_modulus(a, b);
    return FieldElement(static_cast<std::int64_t>(a.value()) + b.value(), a.modulus());
}

FieldElement operator-(FieldElement a, FieldElement b) {
    same_modulus(a, b);
    return FieldElement(static_cast<std::int64_t>(a.value()) - b.value(), a.modulus());
}

FieldElement operator-(FieldElement a) {
    return FieldElement(-static_cast<std::int64_t>(a.value()), a.modulus());
}

FieldElement operator*(FieldElement a, FieldElement b) {
    same_modulus(a, b);
    std::uint64_t prod = static_cast<std::uint64_t>(a.value()) * b.value();
    return FieldElement(static_cast<std::int64_t>(prod % a.modulus()), a.modulus());
}

FieldElement inverse(FieldElement a) {
    if (a.is_zero()) throw FieldError("division by zero in GF(p)");
    // extended Euclid: maintain t with t*a == r (mod p)
    std::int64_t r0 = a.modulus(), r1 = a.value();
    std::int64_t t0 = 0, t1 = 1;
    while (r1 != 0) {
        std::int64_t q = r0 / r1;
        std::int64_t r2 = r0 - q * r1;
        std::int64_t t2 = t0 - q * t1;
        r0 = r1; r1 = r2;
        t0 = t1; t1 = t2;
    }
    return FieldElement(t0, a.modulus());
}

FieldElement field_div(FieldElement a, FieldElement b) {
    same_modulus(a, b);
    return a * inverse(b);
}

bool is_prime(std::uint64_t p) {
    if (p < 2) return false;
    if (p % 2 == 0) return p == 2;
    for (std::uint64_t d = 3; d * d <= p; d += 2)
        if (p % d == 0) return false;
    return true;
}

PrimeField::PrimeField(std::uint32_t p) : p_(p) {
    if (p >= (1u << 31)) throw FieldError("modulus must be below 2^31");
    if (!is_prime(p)) throw FieldError("modulus " + std::to_string(p) + " is not prime");
}

FieldPoly::FieldPoly(std::vector<FieldElement> coeffs, std::uint32_t p) : c_(std::move(coeffs)), p_(p) {
    for (const auto& c : c_)
        if (c.modulus() != p_) throw FieldError("coefficient modulus mismatch");
    trim();
}

FieldPoly FieldPoly::normalize(const std::vector<std::int64_t>& raw, std::uint32_t p) {
    std::vector<FieldElement> c;
    c.reserve(raw.size());
    for (auto v : raw) c.emplace_back(v, p);
    return FieldPoly(std::move(c), p);
}

FieldPoly FieldPoly::monomial(FieldElement c, int degree) {
    std::vector<FieldElement> v(static_cast<std::size_t>(degree) + 1, FieldElement(0, c.modulus()));
    v.back() = c;
    return FieldPoly(std::move(v), c.modulus());
}

void FieldPoly::trim() {
    while (!c_.empty() && c_.back().is_zero()) c_.pop_back();
}

FieldElement FieldPoly::coeff(int i) const {
    if (i < 0 || i > degree()) return FieldElement(0, p_);
    return c_[static_cast<std::size_t>(i)];
}

FieldElement FieldPoly::lead() const {
    if (is_zero()) return FieldElement(0, p_);
    return c_.back();
}

FieldPoly FieldPoly::monic() const {
    if (is_zero()) return *this;
    return scale(*this, inverse(lead()));
}

int FieldPoly::x_valuation() const {
    int e = 0;
    while (e <= degree() && c_[static_cast<std::size_t>(e)].is_zero()) ++e;
    return is_zero() ? 0 : e;
}

FieldPoly FieldPoly::shift_down(int e) const {
    if (e <= 0 || is_zero()) return *this;
    for (int i = 0; i < e && i <= degree(); ++i)
        if (!c_[static_cast<std::size_t>(i)].is_zero()) throw FieldError("shift_down would drop a nonzero term");
    if (e > degree()) return FieldPoly(p_);
    return FieldPoly(std::vector<FieldElement>(c_.begin() + e, c_.end()), p_);
}

FieldPoly FieldPoly::shift_up(int e) const {
    if (e <= 0 || is_zero()) return *this;
    std::vector<FieldElement> v(static_cast<std::size_t>(e), FieldElement(0, p_));
    v.insert(v.end(), c_.begin(), c_.end());
    return FieldPoly(std::move(v), p_);
}

std::string FieldPoly::to_string() const {
    std::ostringstream os;
    if (is_zero()) os << "0";
    for (std::size_t i = 0; i < c_.size(); ++i) os << (i ? "," : "") << c_[i].value();
    os << " mod " << p_;
    return os.str();
}

FieldPoly FieldPoly::parse(std::string_view text, std::uint32_t p) {
    text = trim_ws(text);
    auto m = text.find("mod");
    if (m != std::string_view::npos) {
        auto suffix = parse_int(text.substr(m + 3));
        if (suffix != static_cast<std::int64_t>(p)) throw FieldError("modulus suffix does not match");
        text = trim_ws(text.substr(0, m));
    }
    if (text.empty()) throw FieldError("empty coefficient list");
    std::vector<std::int64_t> raw;
    std::size_t pos = 0;
    while (true) {
        auto comma = text.find(',', pos);
        raw.push_back(parse_int(text.substr(pos, comma == std::string_view::npos ? text.npos : comma - pos)));
        if (comma == std::string_view::npos) break;
        pos = comma + 1;
    }
    return normalize(raw, p);
}

FieldPoly FieldPoly::parse(std::string_view text) {
    auto m = text.find("mod");
    if (m == std::string_view::npos) throw FieldError("missing 'mod p' suffix");
    auto p = parse_int(text.substr(m + 3));
    if (p <= 0 || p >= (1ll << 31)) throw FieldError("modulus out of range");
    PrimeField check(static_cast<std::uint32_t>(p));
    return parse(text, check.modulus());
}

FieldPoly operator+(const FieldPoly& a, const FieldPoly& b) {
    if (a.modulus() != b.modulus()) throw FieldError("polynomial modulus mismatch");
    int d = std::max(a.degree(), b.degree());
    std::vector<FieldElement> v;
    for (int i = 0; i <= d; ++i) v.push_back(a.coeff(i) + b.coeff(i));
    return FieldPoly(std::move(v), a.modulus());
}

FieldPoly operator-(const FieldPoly& a, const FieldPoly& b) {
    if (a.modulus() != b.modulus()) throw FieldError("polynomial modulus mismatch");
    int d = std::max(a.degree(), b.degree());
    std::vector<FieldElement> v;
    for (int i = 0; i <= d; ++i) v.push_back(a.coeff(i) - b.coeff(i));
    return FieldPoly(std::move(v), a.modulus());
}

FieldPoly operator*(const FieldPoly& a, const FieldPoly& b) {
    if (a.modulus() != b.modulus()) throw FieldError("polynomial modulus mismatch");
    if (a.is_zero() || b.is_zero()) return FieldPoly(a.modulus());
    std::vector<FieldElement> v(static_cast<std::size_t>(a.degree() + b.degree() + 1),
                                FieldElement(0, a.modulus()));
    for (int i = 0; i <= a.degree(); ++i)
        for (int j = 0; j <= b.degree(); ++j)
            v[static_cast<std::size_t>(i + j)] = v[static_cast<std::size_t>(i + j)] + a.coeff(i) * b.coeff(j);
    return FieldPoly(std::move(v), a.modulus());
}

FieldPoly scale(const FieldPoly& a, FieldElement c) {
    std::vector<FieldElement> v;
    for (const auto& x : a.coeffs()) v.push_back(x * c);
    return FieldPoly(std::move(v), a.modulus());
}

PolyDivision divmod(const FieldPoly& a, const FieldPoly& b) {
    if (b.is_zero()) throw FieldError("polynomial division by zero");
    const auto p = a.modulus();
    std::vector<FieldElement> r = a.coeffs();
    std::vector<FieldElement> q;
    if (a.degree() >= b.degree())
        q.assign(static_cast<std::size_t>(a.degree() - b.degree() + 1), FieldElement(0, p));
    const auto inv_lead = inverse(b.lead());
    for (int k = a.degree(); k >= b.degree(); --k) {
        auto top = r[static_cast<std::size_t>(k)];
        if (top.is_zero()) continue;
        auto f = top * inv_lead;
        int shift = k - b.degree();
        q[static_cast<std::size_t>(shift)] = f;
        for (int j = 0; j <= b.degree(); ++j)
            r[static_cast<std::size_t>(j + shift)] = r[static_cast<std::size_t>(j + shift)] - f * b.coeff(j);
    }
    return {FieldPoly(std::move(q), p), FieldPoly(std::move(r), p)};
}

}  // namespace systolic::gf
