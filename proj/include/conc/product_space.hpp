#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <vector>

namespace conc {

inline constexpr std::uint64_t kDefaultEnumerationCap = 10'000'000;

// Finite product space: coordinate i takes symbols in [0, sizes[i]).
class Alphabet {
public:
    Alphabet() = default;
    explicit Alphabet(std::vector<int> sizes);

    int dimension() const { return static_cast<int>(sizes_.size()); }
    int symbol_count(int coordinate) const { return sizes_[static_cast<std::size_t>(coordinate)]; }
    const std::vector<int>& sizes() const { return sizes_; }

    // Number of points in the full space, saturating at UINT64_MAX.
    std::uint64_t point_count() const;

    // The alphabet of the first dimension()-1 coordinates.
    Alphabet prefix() const;

    bool operator==(const Alphabet&) const = default;

private:
    std::vector<int> sizes_;
};

struct Point {
    std::vector<int> symbols;

    int dimension() const { return static_cast<int>(symbols.size()); }
    auto operator<=>(const Point&) const = default;
};

// Binary mismatch mask between two points.
struct HammingPattern {
    std::vector<std::uint8_t> bits;

    int dimension() const { return static_cast<int>(bits.size()); }
    int ones() const;
    auto operator<=>(const HammingPattern&) const = default;
};

// Nonnegative weights with squared norm at most one.
class WeightVector {
public:
    explicit WeightVector(std::vector<double> weights);

    const std::vector<double>& values() const { return weights_; }
    std::size_t size() const { return weights_.size(); }

private:
    std::vector<double> weights_;
};

// Extensional subset of a product space: sorted, deduplicated, validated.
class PointSet {
public:
    PointSet() = default;
    PointSet(Alphabet alphabet, std::vector<Point> points);

    const Alphabet& alphabet() const { return alphabet_; }
    const std::vector<Point>& points() const { return points_; }
    std::size_t size() const { return points_.size(); }
    bool empty() const { return points_.empty(); }
    bool contains(const Point& p) const;

private:
    Alphabet alphabet_;
    std::vector<Point> points_;
};

// Independent coordinates; one probability vector per coordinate.
// Marginals must be nonnegative and sum to 1 within 1e-12; they are
// renormalized exactly once at construction.
class ProductMeasure {
public:
    ProductMeasure() = default;
    ProductMeasure(Alphabet alphabet, std::vector<std::vector<double>> marginals);

    const Alphabet& alphabet() const { return alphabet_; }
    const std::vector<double>& marginal(int coordinate) const {
        return marginals_[static_cast<std::size_t>(coordinate)];
    }
    const std::vector<std::vector<double>>& marginals() const { return marginals_; }
    double probability(const Point& p) const;
    double min_marginal() const;

private:
    Alphabet alphabet_;
    std::vector<std::vector<double>> marginals_;
};

HammingPattern hamming_pattern(const Point& x, const Point& y);
double weighted_distance(const Point& x, const Point& y, const WeightVector& w);

// min over y in a of the weighted Hamming distance; a must be nonempty.
double weighted_set_distance(const Point& x, const PointSet& a, const WeightVector& w);

// Prefixes w with (w, last_symbol) in a. Requires dimension >= 2; the result
// may be empty.
PointSet cross_section(const PointSet& a, int last_symbol);

double measure_of_set(const ProductMeasure& q, const PointSet& a);

// Restartable index-based view of the whole space in lexicographic order
// (last coordinate fastest). Construction fails if the space exceeds `cap`.
class SpaceEnumerator {
public:
    explicit SpaceEnumerator(ProductMeasure measure, std::uint64_t cap = kDefaultEnumerationCap);

    std::uint64_t size() const { return size_; }
    Point point_at(std::uint64_t index) const;
    double probability_at(std::uint64_t index) const;
    std::uint64_t index_of(const Point& p) const;
    const ProductMeasure& measure() const { return measure_; }

    void for_each(const std::function<void(std::uint64_t, const Point&, double)>& visit) const;

private:
    ProductMeasure measure_;
    std::vector<std::uint64_t> strides_;
    std::uint64_t size_ = 0;
};

}  // namespace conc
