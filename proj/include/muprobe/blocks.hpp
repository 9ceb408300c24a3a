#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "muprobe/types.hpp"

namespace muprobe {

inline constexpr double kDegeneracyTol = 1e-9;

enum class BlockKind { RepeatedScalar, Full };

struct Block {
    BlockKind kind;
    Index offset;
    Index size;
};

/// Uncertainty pattern diag(delta_1 I_{r_1}, ..., delta_s I_{r_s},
/// Delta_1, ..., Delta_f). Vectors partitioned against a structure store the
/// repeated-scalar blocks first, then the full blocks, each as a contiguous
/// slice in declaration order.
class BlockStructure {
public:
    BlockStructure(std::vector<Index> scalar_sizes, std::vector<Index> full_sizes);

    /// Parses the [count, size_1, ..., size_count] notation, where a leading
    /// zero may be followed by a single placeholder zero ("[0, 0]").
    static BlockStructure from_rm(const std::vector<long long>& r, const std::vector<long long>& m);

    static BlockStructure single_full(Index n) { return BlockStructure({}, {n}); }
    static BlockStructure single_repeated_scalar(Index n) { return BlockStructure({n}, {}); }

    const std::vector<Index>& scalar_sizes() const noexcept { return scalars_; }
    const std::vector<Index>& full_sizes() const noexcept { return fulls_; }
    const std::vector<Block>& blocks() const noexcept { return blocks_; }

    Index n() const noexcept { return n_; }
    std::size_t num_scalar() const noexcept { return scalars_.size(); }
    std::size_t num_full() const noexcept { return fulls_.size(); }

    std::vector<long long> r_notation() const;
    std::vector<long long> m_notation() const;

    /// "r=[1,2] m=[1,1]"
    std::string label() const;

    friend bool operator==(const BlockStructure& a, const BlockStructure& b) {
        return a.scalars_ == b.scalars_ && a.fulls_ == b.fulls_;
    }

private:
    std::vector<Index> scalars_;
    std::vector<Index> fulls_;
    std::vector<Block> blocks_;
    Index n_ = 0;
};

/// z-update: z_r = phase(w_r^H a_r) w_r, z_m = (|w_m| / |a_m|) a_m.
/// Throws DegenerateBlockError when a phase or ratio is undefined.
ComplexVector update_z(const BlockStructure& structure, const ComplexVector& w, const ComplexVector& a,
                       double tol = kDegeneracyTol);

/// b-update: b_r = phase(a_r^H w_r) a_r, b_m = (|a_m| / |w_m|) w_m.
ComplexVector update_b(const BlockStructure& structure, const ComplexVector& a, const ComplexVector& w,
                       double tol = kDegeneracyTol);

/// Indices into structure.blocks() whose update would be ill-defined:
/// scalar blocks with |w^H a| < tol |w||a| (or a vanishing norm), full blocks
/// with |a| < tol or |w| < tol.
std::vector<std::size_t> degeneracy_check(const BlockStructure& structure, const ComplexVector& w,
                                          const ComplexVector& a, double tol = kDegeneracyTol);

nlohmann::json to_json(const BlockStructure& structure);
BlockStructure structure_from_json(const nlohmann::json& j);

}  // namespace muprobe
