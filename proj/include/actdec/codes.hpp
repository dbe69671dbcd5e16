#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace actdec {

using BitVec = std::vector<std::uint8_t>;

class ParseError : public std::runtime_error {
public:
    ParseError(int line, const std::string& msg)
        : std::runtime_error("line " + std::to_string(line) + ": " + msg), line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

// Binary parity-check matrix. Immutable after construction; rows are packed
// bit sets and the sparse row/column adjacency is computed once (message
// passing wants neighbor lists, not matrix algebra).
class ParityCheckMatrix {
public:
    // row_support: per row, 0-based column indices (any order, no duplicates).
    static ParityCheckMatrix from_rows(int n, std::vector<std::vector<int>> row_support);

    int n() const { return n_; }
    int m() const { return m_; }
    int num_edges() const { return num_edges_; }

    const std::vector<std::vector<int>>& row_support() const { return rows_; }
    const std::vector<std::vector<int>>& col_support() const { return cols_; }

    bool at(int row, int col) const {
        return (words_[static_cast<std::size_t>(row) * words_per_row_ + col / 64] >>
                (col % 64)) & 1u;
    }

    bool operator==(const ParityCheckMatrix& other) const {
        return n_ == other.n_ && m_ == other.m_ && rows_ == other.rows_;
    }

    // Packed row words, little-endian bit order; used by the GF(2) routines.
    const std::uint64_t* row_words(int row) const {
        return words_.data() + static_cast<std::size_t>(row) * words_per_row_;
    }
    int words_per_row() const { return static_cast<int>(words_per_row_); }

private:
    ParityCheckMatrix() = default;
    int n_ = 0, m_ = 0, num_edges_ = 0;
    std::size_t words_per_row_ = 0;
    std::vector<std::uint64_t> words_;
    std::vector<std::vector<int>> rows_, cols_;
};

ParityCheckMatrix parse_alist(std::string_view text);
std::string serialize_alist(const ParityCheckMatrix& pcm);

int rank_gf2(const ParityCheckMatrix& pcm);
BitVec syndrome(const ParityCheckMatrix& pcm, const BitVec& bits);

// All 2^k codewords in deterministic order (index 0 is the zero word).
// Guarded at k <= 20.
std::vector<BitVec> enumerate_codewords(const ParityCheckMatrix& pcm);
int min_distance(const ParityCheckMatrix& pcm);

int hamming_weight(const BitVec& v);

struct CodeSpec {
    ParityCheckMatrix pcm;
    int k = 0;
    double rate = 0.0;
    std::optional<int> d_min;
    std::optional<double> r_pack;  // sqrt(d_min), Euclidean units

    static CodeSpec from_pcm(ParityCheckMatrix pcm, std::optional<int> d_min = std::nullopt);
};

// Embedded fixtures for deterministic tests without touching the filesystem.
namespace fixtures {
const char* hamming74_alist();
const char* rep3_alist();
const char* bch15_7_alist();
}  // namespace fixtures

}  // namespace actdec
