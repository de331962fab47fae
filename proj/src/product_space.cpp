#include "conc/product_space.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace conc {

namespace {

void require_same_dimension(const Point& x, const Point& y) {
    if (x.symbols.size() != y.symbols.size())
        throw std::invalid_argument("points have different dimensions");
}

}  // namespace

Alphabet::Alphabet(std::vector<int> sizes) : sizes_(std::move(sizes)) {
    if (sizes_.empty()) throw std::invalid_argument("alphabet needs at least one coordinate");
    for (int s : sizes_)
        if (s < 1) throw std::invalid_argument("alphabet sizes must be positive");
}

std::uint64_t Alphabet::point_count() const {
    std::uint64_t total = 1;
    for (int s : sizes_) {
        const auto u = static_cast<std::uint64_t>(s);
        if (total > std::numeric_limits<std::uint64_t>::max() / u)
            return std::numeric_limits<std::uint64_t>::max();
        total *= u;
    }
    return total;
}

Alphabet Alphabet::prefix() const {
    if (sizes_.size() < 2)
        throw std::invalid_argument("prefix alphabet needs dimension >= 2");
    return Alphabet(std::vector<int>(sizes_.begin(), sizes_.end() - 1));
}

int HammingPattern::ones() const {
    int k = 0;
    for (std::uint8_t b : bits) k += b;
    return k;
}

WeightVector::WeightVector(std::vector<double> weights) : weights_(std::move(weights)) {
    double norm2 = 0.0;
    for (double w : weights_) {
        if (!(w >= 0.0)) throw std::invalid_argument("weights must be nonnegative");
        norm2 += w * w;
    }
    if (norm2 > 1.0 + 1e-12)
        throw std::invalid_argument("weight vector has squared norm above one");
}

PointSet::PointSet(Alphabet alphabet, std::vector<Point> points)
    : alphabet_(std::move(alphabet)), points_(std::move(points)) {
    const int n = alphabet_.dimension();
    for (const Point& p : points_) {
        if (p.dimension() != n)
            throw std::invalid_argument("point dimension does not match the alphabet");
        for (int i = 0; i < n; ++i) {
            const int s = p.symbols[static_cast<std::size_t>(i)];
            if (s < 0 || s >= alphabet_.symbol_count(i))
                throw std::invalid_argument("point symbol outside the alphabet range");
        }
    }
    std::sort(points_.begin(), points_.end());
    points_.erase(std::unique(points_.begin(), points_.end()), points_.end());
}

bool PointSet::contains(const Point& p) const {
    return std::binary_search(points_.begin(), points_.end(), p);
}

ProductMeasure::ProductMeasure(Alphabet alphabet, std::vector<std::vector<double>> marginals)
    : alphabet_(std::move(alphabet)), marginals_(std::move(marginals)) {
    const int n = alphabet_.dimension();
    if (marginals_.size() != static_cast<std::size_t>(n))
        throw std::invalid_argument("need one marginal per coordinate");
    for (int i = 0; i < n; ++i) {
        auto& m = marginals_[static_cast<std::size_t>(i)];
        if (m.size() != static_cast<std::size_t>(alphabet_.symbol_count(i)))
            throw std::invalid_argument("marginal " + std::to_string(i) +
                                        " does not match the coordinate size");
        double sum = 0.0;
        for (double p : m) {
            if (!(p >= 0.0))
                throw std::invalid_argument("marginal " + std::to_string(i) +
                                            " has a negative entry");
            sum += p;
        }
        if (std::abs(sum - 1.0) > 1e-12)
            throw std::invalid_argument("marginal " + std::to_string(i) +
                                        " sums to " + std::to_string(sum) +
                                        ", expected 1 within 1e-12");
        // Renormalize exactly once so long products do not drift.
        for (double& p : m) p /= sum;
    }
}

double ProductMeasure::probability(const Point& p) const {
    if (p.dimension() != alphabet_.dimension())
        throw std::invalid_argument("point dimension does not match the measure");
    double prob = 1.0;
    for (int i = 0; i < alphabet_.dimension(); ++i)
        prob *= marginals_[static_cast<std::size_t>(i)][static_cast<std::size_t>(
            p.symbols[static_cast<std::size_t>(i)])];
    return prob;
}

double ProductMeasure::min_marginal() const {
    double lo = 1.0;
    for (const auto& m : marginals_)
        for (double p : m) lo = std::min(lo, p);
    return lo;
}

HammingPattern hamming_pattern(const Point& x, const Point& y) {
    require_same_dimension(x, y);
    HammingPattern h;
    h.bits.resize(x.symbols.size());
    for (std::size_t i = 0; i < x.symbols.size(); ++i)
        h.bits[i] = x.symbols[i] != y.symbols[i] ? 1 : 0;
    return h;
}

double weighted_distance(const Point& x, const Point& y, const WeightVector& w) {
    require_same_dimension(x, y);
    if (w.size() != x.symbols.size())
        throw std::invalid_argument("weight vector dimension mismatch");
    double d = 0.0;
    for (std::size_t i = 0; i < x.symbols.size(); ++i)
        if (x.symbols[i] != y.symbols[i]) d += w.values()[i];
    return d;
}

double weighted_set_distance(const Point& x, const PointSet& a, const WeightVector& w) {
    if (a.empty())
        throw std::invalid_argument("distance to an empty set is undefined");
    double best = std::numeric_limits<double>::infinity();
    for (const Point& y : a.points()) best = std::min(best, weighted_distance(x, y, w));
    return best;
}

PointSet cross_section(const PointSet& a, int last_symbol) {
    const int n = a.alphabet().dimension();
    if (n < 2) throw std::invalid_argument("cross sections need dimension >= 2");
    if (last_symbol < 0 || last_symbol >= a.alphabet().symbol_count(n - 1))
        throw std::invalid_argument("section symbol outside the last coordinate range");
    std::vector<Point> prefixes;
    for (const Point& p : a.points()) {
        if (p.symbols.back() != last_symbol) continue;
        prefixes.push_back(
            Point{std::vector<int>(p.symbols.begin(), p.symbols.end() - 1)});
    }
    return PointSet(a.alphabet().prefix(), std::move(prefixes));
}

double measure_of_set(const ProductMeasure& q, const PointSet& a) {
    if (!a.empty() && a.alphabet() != q.alphabet())
        throw std::invalid_argument("set and measure live on different alphabets");
    double total = 0.0;
    for (const Point& p : a.points()) total += q.probability(p);
    return total;
}

SpaceEnumerator::SpaceEnumerator(ProductMeasure measure, std::uint64_t cap)
    : measure_(std::move(measure)) {
    const auto& alphabet = measure_.alphabet();
    size_ = alphabet.point_count();
    if (size_ > cap)
        throw std::invalid_argument("product space exceeds the enumeration cap");
    const int n = alphabet.dimension();
    strides_.assign(static_cast<std::size_t>(n), 1);
    for (int i = n - 2; i >= 0; --i)
        strides_[static_cast<std::size_t>(i)] =
            strides_[static_cast<std::size_t>(i + 1)] *
            static_cast<std::uint64_t>(alphabet.symbol_count(i + 1));
}

Point SpaceEnumerator::point_at(std::uint64_t index) const {
    if (index >= size_) throw std::out_of_range("enumeration index out of range");
    const int n = measure_.alphabet().dimension();
    Point p;
    p.symbols.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const std::uint64_t stride = strides_[static_cast<std::size_t>(i)];
        p.symbols[static_cast<std::size_t>(i)] = static_cast<int>(index / stride);
        index %= stride;
    }
    return p;
}

double SpaceEnumerator::probability_at(std::uint64_t index) const {
    return measure_.probability(point_at(index));
}

std::uint64_t SpaceEnumerator::index_of(const Point& p) const {
    if (p.dimension() != measure_.alphabet().dimension())
        throw std::invalid_argument("point dimension does not match the space");
    std::uint64_t index = 0;
    for (int i = 0; i < p.dimension(); ++i)
        index += strides_[static_cast<std::size_t>(i)] *
                 static_cast<std::uint64_t>(p.symbols[static_cast<std::size_t>(i)]);
    return index;
}

void SpaceEnumerator::for_each(
    const std::function<void(std::uint64_t, const Point&, double)>& visit) const {
    for (std::uint64_t i = 0; i < size_; ++i) {
        const Point p = point_at(i);
        visit(i, p, measure_.probability(p));
    }
}

}  // namespace conc
