#include "covasym/channel.hpp"

namespace covasym {

CMatrix CovariantChannel::apply(const CMatrix& rho) const {
    if (rho.rows() != d_in || rho.cols() != d_in) throw DimensionMismatch("channel: input dimension mismatch");
    const CMatrix v = superop * Eigen::Map<const CVector>(rho.data(), rho.size());
    return Eigen::Map<const CMatrix>(v.data(), d_out, d_out);
}

CMatrix CovariantChannel::choi() const {
    CMatrix j(d_in * d_out, d_in * d_out);
    for (int a = 0; a < d_in; ++a)
        for (int b = 0; b < d_in; ++b) {
            const CVector col = superop.col(b * d_in + a);
            j.block(a * d_out, b * d_out, d_out, d_out) = Eigen::Map<const CMatrix>(col.data(), d_out, d_out);
        }
    return j;
}

CovariantChannel CovariantChannel::from_choi(const CMatrix& j, int d_in, int d_out, std::string provenance) {
    if (j.rows() != d_in * d_out || j.cols() != d_in * d_out) throw DimensionMismatch("from_choi: shape mismatch");
    CovariantChannel ch;
    ch.d_in = d_in;
    ch.d_out = d_out;
    ch.provenance = std::move(provenance);
    ch.superop = CMatrix(d_out * d_out, d_in * d_in);
    for (int a = 0; a < d_in; ++a)
        for (int b = 0; b < d_in; ++b) {
            const CMatrix blk = j.block(a * d_out, b * d_out, d_out, d_out);
            ch.superop.col(b * d_in + a) = Eigen::Map<const CVector>(blk.data(), blk.size());
        }
    return ch;
}

bool CovariantChannel::is_cptp(double tol) const {
    const CMatrix j = choi();
    if (!is_hermitian(j, tol)) return false;
    if (min_eigenvalue(j) < -tol) return false;
    return max_abs_entry(partial_trace(j, d_in, d_out, Keep::R) - CMatrix::Identity(d_in, d_in)) <= tol;
}

bool CovariantChannel::is_covariant(const Representation& in, const Representation& out, double tol) const {
    if (in.dim() != d_in || out.dim() != d_out || !in.compatible_with(out)) return false;
    const auto ui = in.sample_unitaries();
    const auto uo = out.sample_unitaries();
    for (size_t g = 0; g < ui.size(); ++g) {
        const CMatrix si = kron(ui[g].conjugate(), ui[g]);
        const CMatrix so = kron(uo[g].conjugate(), uo[g]);
        if (max_abs_entry(superop * si - so * superop) > tol) return false;
    }
    return true;
}

}  // namespace covasym
