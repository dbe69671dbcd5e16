#include "actdec/codes.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <sstream>

namespace actdec {

namespace {

// Whitespace tokenizer that tracks 1-based line numbers for diagnostics.
class Tokenizer {
public:
    explicit Tokenizer(std::string_view text) : text_(text) {}

    // Next integer token, or nullopt at end of input.
    std::optional<long> next() {
        skip_ws();
        if (pos_ >= text_.size()) return std::nullopt;
        const std::size_t start = pos_;
        if (text_[pos_] == '-' || text_[pos_] == '+') ++pos_;
        while (pos_ < text_.size() && !is_space(text_[pos_])) ++pos_;
        const std::string_view tok = text_.substr(start, pos_ - start);
        long value = 0;
        bool ok = !tok.empty();
        bool neg = false;
        std::size_t i = 0;
        if (ok && (tok[0] == '-' || tok[0] == '+')) {
            neg = tok[0] == '-';
            i = 1;
            ok = tok.size() > 1;
        }
        for (; ok && i < tok.size(); ++i) {
            if (tok[i] < '0' || tok[i] > '9') {
                ok = false;
            } else {
                value = value * 10 + (tok[i] - '0');
                if (value > 1000000000L) ok = false;  // alist fields are small
            }
        }
        if (!ok) throw ParseError(line_, "expected integer, got '" + std::string(tok) + "'");
        return neg ? -value : value;
    }

    long require(const char* what) {
        auto v = next();
        if (!v) throw ParseError(line_, std::string("unexpected end of input, expected ") + what);
        return *v;
    }

    // All integers up to the end of the current line.
    std::vector<long> rest_of_line() {
        std::vector<long> out;
        while (true) {
            skip_spaces_only();
            if (pos_ >= text_.size() || text_[pos_] == '\n') break;
            auto v = next();
            if (!v) break;
            out.push_back(*v);
        }
        return out;
    }

    void expect_line_break(const char* context) {
        skip_spaces_only();
        if (pos_ < text_.size() && text_[pos_] != '\n')
            throw ParseError(line_, std::string("trailing data after ") + context);
        if (pos_ < text_.size()) {
            ++pos_;
            ++line_;
        }
    }

    int line() const { return line_; }

private:
    static bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; }
    void skip_ws() {
        while (pos_ < text_.size() && is_space(text_[pos_])) {
            if (text_[pos_] == '\n') ++line_;
            ++pos_;
        }
    }
    void skip_spaces_only() {
        while (pos_ < text_.size() &&
               (text_[pos_] == ' ' || text_[pos_] == '\t' || text_[pos_] == '\r'))
            ++pos_;
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    int line_ = 1;
};

std::vector<std::uint64_t> pack_rows(int n, int m, const std::vector<std::vector<int>>& rows,
                                     std::size_t words_per_row) {
    std::vector<std::uint64_t> words(words_per_row * m, 0);
    for (int r = 0; r < m; ++r)
        for (int c : rows[r]) words[words_per_row * r + c / 64] |= 1ULL << (c % 64);
    return words;
}

}  // namespace

ParityCheckMatrix ParityCheckMatrix::from_rows(int n, std::vector<std::vector<int>> row_support) {
    const int m = static_cast<int>(row_support.size());
    if (m < 1) throw std::invalid_argument("parity-check matrix needs at least one row");
    if (n <= m) throw std::invalid_argument("parity-check matrix requires n > m");

    ParityCheckMatrix pcm;
    pcm.n_ = n;
    pcm.m_ = m;
    pcm.cols_.assign(n, {});
    int edges = 0;
    for (int r = 0; r < m; ++r) {
        auto& row = row_support[r];
        std::sort(row.begin(), row.end());
        if (row.empty()) throw std::invalid_argument("row " + std::to_string(r) + " is all-zero");
        if (std::adjacent_find(row.begin(), row.end()) != row.end())
            throw std::invalid_argument("row " + std::to_string(r) + " has duplicate entries");
        if (row.front() < 0 || row.back() >= n)
            throw std::invalid_argument("row " + std::to_string(r) + " has column out of range");
        for (int c : row) pcm.cols_[c].push_back(r);
        edges += static_cast<int>(row.size());
    }
    for (int c = 0; c < n; ++c)
        if (pcm.cols_[c].empty())
            throw std::invalid_argument("column " + std::to_string(c) + " is all-zero");
    pcm.rows_ = std::move(row_support);
    pcm.num_edges_ = edges;
    pcm.words_per_row_ = static_cast<std::size_t>((n + 63) / 64);
    pcm.words_ = pack_rows(n, m, pcm.rows_, pcm.words_per_row_);
    return pcm;
}

ParityCheckMatrix parse_alist(std::string_view text) {
    Tokenizer tok(text);
    const long n = tok.require("n");
    const long m = tok.require("m");
    if (n <= 0 || m <= 0) throw ParseError(tok.line(), "malformed header: n and m must be positive");
    tok.expect_line_break("header");

    const long max_col_deg = tok.require("max column degree");
    const long max_row_deg = tok.require("max row degree");
    if (max_col_deg <= 0 || max_row_deg <= 0)
        throw ParseError(tok.line(), "malformed header: degrees must be positive");
    tok.expect_line_break("degree header");

    std::vector<long> col_deg(n), row_deg(m);
    for (long c = 0; c < n; ++c) {
        col_deg[c] = tok.require("column degree");
        if (col_deg[c] < 1 || col_deg[c] > max_col_deg)
            throw ParseError(tok.line(), "column degree out of range at column " + std::to_string(c + 1));
    }
    tok.expect_line_break("column degrees");
    for (long r = 0; r < m; ++r) {
        row_deg[r] = tok.require("row degree");
        if (row_deg[r] < 1 || row_deg[r] > max_row_deg)
            throw ParseError(tok.line(), "row degree out of range at row " + std::to_string(r + 1));
    }
    tok.expect_line_break("row degrees");

    // Column adjacency section: n lines of 1-based check indices, zero padding ignored.
    std::vector<std::vector<int>> col_adj(n);
    for (long c = 0; c < n; ++c) {
        const int line = tok.line();
        for (long v : tok.rest_of_line()) {
            if (v == 0) continue;  // padding
            if (v < 1 || v > m)
                throw ParseError(line, "index out of range in column " + std::to_string(c + 1) +
                                           ": " + std::to_string(v));
            col_adj[c].push_back(static_cast<int>(v - 1));
        }
        if (static_cast<long>(col_adj[c].size()) != col_deg[c])
            throw ParseError(line, "degree mismatch in column " + std::to_string(c + 1) +
                                       ": declared " + std::to_string(col_deg[c]) + ", found " +
                                       std::to_string(col_adj[c].size()));
        tok.expect_line_break("column entries");
    }

    // Row adjacency section: m lines of 1-based variable indices.
    std::vector<std::vector<int>> row_adj(m);
    for (long r = 0; r < m; ++r) {
        const int line = tok.line();
        for (long v : tok.rest_of_line()) {
            if (v == 0) continue;
            if (v < 1 || v > n)
                throw ParseError(line, "index out of range in row " + std::to_string(r + 1) + ": " +
                                           std::to_string(v));
            row_adj[r].push_back(static_cast<int>(v - 1));
        }
        if (static_cast<long>(row_adj[r].size()) != row_deg[r])
            throw ParseError(line, "degree mismatch in row " + std::to_string(r + 1) + ": declared " +
                                       std::to_string(row_deg[r]) + ", found " +
                                       std::to_string(row_adj[r].size()));
        tok.expect_line_break("row entries");
    }

    // The two sections must describe the same support.
    std::vector<std::vector<int>> from_cols(m);
    for (long c = 0; c < n; ++c)
        for (int r : col_adj[c]) from_cols[r].push_back(static_cast<int>(c));
    for (long r = 0; r < m; ++r) {
        auto a = from_cols[r];
        auto b = row_adj[r];
        std::sort(a.begin(), a.end());
        std::sort(b.begin(), b.end());
        if (a != b)
            throw ParseError(tok.line(), "row/column adjacency mismatch at row " + std::to_string(r + 1));
    }

    try {
        return ParityCheckMatrix::from_rows(static_cast<int>(n), std::move(row_adj));
    } catch (const std::invalid_argument& e) {
        throw ParseError(tok.line(), e.what());
    }
}

std::string serialize_alist(const ParityCheckMatrix& pcm) {
    std::ostringstream os;
    const auto& rows = pcm.row_support();
    const auto& cols = pcm.col_support();
    std::size_t max_col = 0, max_row = 0;
    for (const auto& c : cols) max_col = std::max(max_col, c.size());
    for (const auto& r : rows) max_row = std::max(max_row, r.size());
    os << pcm.n() << ' ' << pcm.m() << '\n';
    os << max_col << ' ' << max_row << '\n';
    for (int c = 0; c < pcm.n(); ++c) os << cols[c].size() << (c + 1 < pcm.n() ? ' ' : '\n');
    for (int r = 0; r < pcm.m(); ++r) os << rows[r].size() << (r + 1 < pcm.m() ? ' ' : '\n');
    for (const auto& c : cols) {
        for (std::size_t i = 0; i < c.size(); ++i) os << c[i] + 1 << (i + 1 < c.size() ? ' ' : '\n');
    }
    for (const auto& r : rows) {
        for (std::size_t i = 0; i < r.size(); ++i) os << r[i] + 1 << (i + 1 < r.size() ? ' ' : '\n');
    }
    return os.str();
}

namespace {

// Row-reduce a copy of the packed rows; returns (rank, pivot column per
// reduced row) and leaves the eliminated rows in `work`.
int eliminate(const ParityCheckMatrix& pcm, std::vector<std::vector<std::uint64_t>>& work,
              std::vector<int>& pivot_cols) {
    const int m = pcm.m(), n = pcm.n(), W = pcm.words_per_row();
    work.assign(m, std::vector<std::uint64_t>(W));
    for (int r = 0; r < m; ++r)
        std::copy(pcm.row_words(r), pcm.row_words(r) + W, work[r].begin());

    pivot_cols.clear();
    int rank = 0;
    for (int col = 0; col < n && rank < m; ++col) {
        const int w = col / 64;
        const std::uint64_t bit = 1ULL << (col % 64);
        int pivot = -1;
        for (int r = rank; r < m; ++r)
            if (work[r][w] & bit) {
                pivot = r;
                break;
            }
        if (pivot < 0) continue;
        std::swap(work[rank], work[pivot]);
        for (int r = 0; r < m; ++r) {
            if (r != rank && (work[r][w] & bit))
                for (int i = 0; i < W; ++i) work[r][i] ^= work[rank][i];
        }
        pivot_cols.push_back(col);
        ++rank;
    }
    return rank;
}

}  // namespace

int rank_gf2(const ParityCheckMatrix& pcm) {
    std::vector<std::vector<std::uint64_t>> work;
    std::vector<int> pivots;
    return eliminate(pcm, work, pivots);
}

BitVec syndrome(const ParityCheckMatrix& pcm, const BitVec& bits) {
    if (static_cast<int>(bits.size()) != pcm.n())
        throw std::invalid_argument("syndrome: word length " + std::to_string(bits.size()) +
                                    " does not match n = " + std::to_string(pcm.n()));
    BitVec s(pcm.m(), 0);
    for (int r = 0; r < pcm.m(); ++r) {
        unsigned acc = 0;
        for (int c : pcm.row_support()[r]) acc ^= bits[c];
        s[r] = static_cast<std::uint8_t>(acc & 1u);
    }
    return s;
}

std::vector<BitVec> enumerate_codewords(const ParityCheckMatrix& pcm) {
    std::vector<std::vector<std::uint64_t>> reduced;
    std::vector<int> pivot_cols;
    const int rank = eliminate(pcm, reduced, pivot_cols);
    const int n = pcm.n();
    const int k = n - rank;
    if (k > 20)
        throw std::domain_error("enumerate_codewords: k = " + std::to_string(k) +
                                " exceeds the brute-force guard (20)");

    std::vector<bool> is_pivot(n, false);
    for (int c : pivot_cols) is_pivot[c] = true;
    std::vector<int> free_cols;
    for (int c = 0; c < n; ++c)
        if (!is_pivot[c]) free_cols.push_back(c);

    // Null-space basis: one vector per free column, pivots back-filled from
    // the reduced rows.
    std::vector<BitVec> basis;
    basis.reserve(k);
    for (int f : free_cols) {
        BitVec v(n, 0);
        v[f] = 1;
        for (int r = 0; r < rank; ++r) {
            const int w = f / 64;
            if (reduced[r][w] >> (f % 64) & 1) v[pivot_cols[r]] = 1;
        }
        basis.push_back(std::move(v));
    }

    std::vector<BitVec> words;
    words.reserve(std::size_t{1} << k);
    for (std::uint32_t idx = 0; idx < (1u << k); ++idx) {
        BitVec w(n, 0);
        for (int j = 0; j < k; ++j)
            if (idx >> j & 1)
                for (int c = 0; c < n; ++c) w[c] ^= basis[j][c];
        words.push_back(std::move(w));
    }
    return words;
}

int min_distance(const ParityCheckMatrix& pcm) {
    const auto words = enumerate_codewords(pcm);
    int best = pcm.n() + 1;
    for (const auto& w : words) {
        const int wt = hamming_weight(w);
        if (wt > 0 && wt < best) best = wt;
    }
    if (best > pcm.n()) throw std::runtime_error("min_distance: no nonzero codeword found");
    return best;
}

int hamming_weight(const BitVec& v) {
    int w = 0;
    for (auto b : v) w += b != 0;
    return w;
}

CodeSpec CodeSpec::from_pcm(ParityCheckMatrix pcm, std::optional<int> d_min) {
    CodeSpec spec;
    spec.k = pcm.n() - rank_gf2(pcm);
    spec.rate = static_cast<double>(spec.k) / pcm.n();
    if (spec.rate <= 0.0 || spec.rate >= 1.0)
        throw std::invalid_argument("code rate must lie in (0, 1)");
    if (d_min) {
        if (*d_min < 1) throw std::invalid_argument("d_min must be positive");
        spec.d_min = d_min;
        spec.r_pack = std::sqrt(static_cast<double>(*d_min));
    }
    spec.pcm = std::move(pcm);
    return spec;
}

namespace fixtures {

const char* hamming74_alist() {
    return "7 3\n3 4\n1 1 2 1 2 2 3\n4 4 4\n1\n2\n1 2\n3\n1 3\n2 3\n1 2 3\n"
           "1 3 5 7\n2 3 6 7\n4 5 6 7\n";
}

const char* rep3_alist() {
    return "3 2\n2 2\n1 2 1\n2 2\n1\n1 2\n2\n1 2\n2 3\n";
}

const char* bch15_7_alist() {
    return "15 8\n4 4\n1 2 2 3 3 3 3 4 3 2 2 1 1 1 1\n4 4 4 4 4 4 4 4\n"
           "1\n1 2\n2 3\n1 3 4\n2 4 5\n3 5 6\n4 6 7\n1 5 7 8\n2 6 8\n3 7\n4 8\n5\n6\n7\n8\n"
           "1 2 4 8\n2 3 5 9\n3 4 6 10\n4 5 7 11\n5 6 8 12\n6 7 9 13\n7 8 10 14\n8 9 11 15\n";
}

}  // namespace fixtures

}  // namespace actdec
