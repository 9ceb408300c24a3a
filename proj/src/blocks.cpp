#include "muprobe/blocks.hpp"

#include <sstream>

namespace muprobe {

BlockStructure::BlockStructure(std::vector<Index> scalar_sizes, std::vector<Index> full_sizes)
    : scalars_(std::move(scalar_sizes)), fulls_(std::move(full_sizes)) {
    if (scalars_.empty() && fulls_.empty())
        throw ConfigError("block structure needs at least one block");
    Index offset = 0;
    for (Index r : scalars_) {
        if (r < 1) throw ConfigError("repeated-scalar block sizes must be >= 1");
        blocks_.push_back({BlockKind::RepeatedScalar, offset, r});
        offset += r;
    }
    for (Index m : fulls_) {
        if (m < 1) throw ConfigError("full block sizes must be >= 1");
        blocks_.push_back({BlockKind::Full, offset, m});
        offset += m;
    }
    n_ = offset;
}

namespace {

std::vector<Index> parse_counted(const std::vector<long long>& v, const char* name) {
    if (v.empty()) throw ConfigError(std::string("structure '") + name + "' must start with the block count");
    const long long count = v.front();
    if (count < 0) throw ConfigError(std::string("structure '") + name + "' has a negative block count");
    if (count == 0) {
        if (v.size() > 2 || (v.size() == 2 && v[1] != 0))
            throw ConfigError(std::string("structure '") + name + "' declares 0 blocks but lists sizes");
        return {};
    }
    if (static_cast<long long>(v.size()) != count + 1)
        throw ConfigError(std::string("structure '") + name + "' declares " + std::to_string(count) +
                          " blocks but lists " + std::to_string(v.size() - 1) + " sizes");
    std::vector<Index> sizes;
    for (std::size_t i = 1; i < v.size(); ++i) {
        if (v[i] < 1) throw ConfigError(std::string("structure '") + name + "' has a block size < 1");
        sizes.push_back(static_cast<Index>(v[i]));
    }
    return sizes;
}

std::vector<long long> counted(const std::vector<Index>& sizes) {
    std::vector<long long> out{static_cast<long long>(sizes.size())};
    if (sizes.empty()) out.push_back(0);
    for (Index s : sizes) out.push_back(static_cast<long long>(s));
    return out;
}

std::string list(const std::vector<long long>& v) {
    std::ostringstream os;
    os << "[";
    for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
    os << "]";
    return os.str();
}

Complex unit_phase(Complex c) { return c / std::abs(c); }

}  // namespace

BlockStructure BlockStructure::from_rm(const std::vector<long long>& r, const std::vector<long long>& m) {
    return BlockStructure(parse_counted(r, "r"), parse_counted(m, "m"));
}

std::vector<long long> BlockStructure::r_notation() const { return counted(scalars_); }
std::vector<long long> BlockStructure::m_notation() const { return counted(fulls_); }

std::string BlockStructure::label() const {
    return "r=" + list(r_notation()) + " m=" + list(m_notation());
}

std::vector<std::size_t> degeneracy_check(const BlockStructure& structure, const ComplexVector& w,
                                          const ComplexVector& a, double tol) {
    if (w.size() != structure.n() || a.size() != structure.n())
        throw DimensionError("vector length does not match block structure dimension");
    std::vector<std::size_t> bad;
    const auto& blocks = structure.blocks();
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        const Block& blk = blocks[i];
        const auto wb = w.segment(blk.offset, blk.size);
        const auto ab = a.segment(blk.offset, blk.size);
        const double wn = wb.norm();
        const double an = ab.norm();
        if (blk.kind == BlockKind::RepeatedScalar) {
            if (wn < tol || an < tol || std::abs(wb.dot(ab)) < tol * wn * an) bad.push_back(i);
        } else if (wn < tol || an < tol) {
            bad.push_back(i);
        }
    }
    return bad;
}

ComplexVector update_z(const BlockStructure& structure, const ComplexVector& w, const ComplexVector& a,
                       double tol) {
    const auto bad = degeneracy_check(structure, w, a, tol);
    if (!bad.empty()) throw DegenerateBlockError(bad.front(), "degenerate block in z-update");
    ComplexVector z(structure.n());
    for (const Block& blk : structure.blocks()) {
        const auto wb = w.segment(blk.offset, blk.size);
        const auto ab = a.segment(blk.offset, blk.size);
        if (blk.kind == BlockKind::RepeatedScalar)
            z.segment(blk.offset, blk.size) = unit_phase(wb.dot(ab)) * wb;  // dot() conjugates w
        else
            z.segment(blk.offset, blk.size) = (wb.norm() / ab.norm()) * ab;
    }
    return z;
}

ComplexVector update_b(const BlockStructure& structure, const ComplexVector& a, const ComplexVector& w,
                       double tol) {
    const auto bad = degeneracy_check(structure, w, a, tol);
    if (!bad.empty()) throw DegenerateBlockError(bad.front(), "degenerate block in b-update");
    ComplexVector b(structure.n());
    for (const Block& blk : structure.blocks()) {
        const auto wb = w.segment(blk.offset, blk.size);
        const auto ab = a.segment(blk.offset, blk.size);
        if (blk.kind == BlockKind::RepeatedScalar)
            b.segment(blk.offset, blk.size) = unit_phase(ab.dot(wb)) * ab;
        else
            b.segment(blk.offset, blk.size) = (ab.norm() / wb.norm()) * wb;
    }
    return b;
}

nlohmann::json to_json(const BlockStructure& structure) {
    return {{"r", structure.r_notation()}, {"m", structure.m_notation()}};
}

BlockStructure structure_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ConfigError("structure must be an object with keys 'r' and 'm'");
    for (const auto& [key, _] : j.items())
        if (key != "r" && key != "m") throw ConfigError("unknown structure key '" + key + "'");
    auto read = [&](const char* key) {
        if (!j.contains(key)) return std::vector<long long>{0, 0};
        const auto& v = j.at(key);
        if (!v.is_array()) throw ConfigError(std::string("structure '") + key + "' must be an integer array");
        std::vector<long long> out;
        for (const auto& e : v) {
            if (!e.is_number_integer()) throw ConfigError(std::string("structure '") + key + "' must hold integers");
            out.push_back(e.get<long long>());
        }
        return out;
    };
    return BlockStructure::from_rm(read("r"), read("m"));
}

}  // namespace muprobe
