#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace pusc {

/// Dense row-major matrix of doubles.
///
/// Every constructor and operation rejects non-finite entries, so a Matrix
/// that exists is always finite.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
    Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);

    static Matrix from_rows(const std::vector<std::vector<double>>& rows);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }

    double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }
    double& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }

    std::span<const double> row(std::size_t r) const noexcept {
        return {data_.data() + r * cols_, cols_};
    }
    std::span<double> row(std::size_t r) noexcept { return {data_.data() + r * cols_, cols_}; }

    std::span<const double> data() const noexcept { return data_; }
    std::span<double> data() noexcept { return data_; }

    /// Rows selected by index, in the given order (repeats allowed).
    Matrix select_rows(std::span<const std::size_t> indices) const;

    Matrix transposed() const;

    bool operator==(const Matrix& other) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

/// Standard product a·b. Throws ShapeError unless a.cols() == b.rows().
Matrix matmul(const Matrix& a, const Matrix& b);

/// a·bᵀ without materialising the transpose.
Matrix matmul_transposed(const Matrix& a, const Matrix& b);

/// aᵀ·b without materialising the transpose.
Matrix transposed_matmul(const Matrix& a, const Matrix& b);

/// Throws NumericError if any value is NaN or infinite.
void require_finite(std::span<const double> values, const char* what);

/// SplitMix64 step: advances `state` and returns the mixed output.
std::uint64_t splitmix64(std::uint64_t& state) noexcept;

/// Deterministic generator: xoshiro256** (Blackman & Vigna, 2018) with its
/// 256-bit state expanded from the 64-bit seed by four SplitMix64 steps.
///
/// Uniforms use the top 53 bits: (next() >> 11) * 2^-53, giving [0, 1).
/// Normals use the Box-Muller transform on a pair of uniforms
/// (u1 mapped to (0, 1]); the sine half of each pair is cached and returned
/// by the following call.
///
/// child(i) returns the generator obtained by applying the xoshiro256**
/// jump polynomial i+1 times to the seed state, so children occupy
/// non-overlapping 2^128-long blocks of the parent sequence.
class Rng {
public:
    explicit Rng(std::uint64_t seed) noexcept;

    std::uint64_t seed() const noexcept { return seed_; }

    std::uint64_t next_u64() noexcept;
    double uniform() noexcept;
    double normal() noexcept;

    /// Uniform integer in [0, bound). bound must be > 0.
    std::uint64_t below(std::uint64_t bound) noexcept;

    Rng child(std::uint64_t index) const noexcept;

    /// Fisher-Yates permutation of 0..n-1.
    std::vector<std::size_t> permutation(std::size_t n) noexcept;

private:
    void jump() noexcept;

    std::uint64_t seed_;
    std::uint64_t state_[4];
    bool has_spare_ = false;
    double spare_ = 0.0;
};

std::vector<double> rng_uniform(Rng& rng, std::size_t n);

/// n draws from N(mean, sd²). Throws ParameterError for sd <= 0.
std::vector<double> rng_normal(Rng& rng, std::size_t n, double mean, double sd);

} // namespace pusc
