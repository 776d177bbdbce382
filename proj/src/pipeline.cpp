#include "selfsim/pipeline.hpp"

#include <cmath>

namespace selfsim {

std::vector<double> Analysis::xi_len_b() const {
    std::vector<double> v;
    for (auto b : b_letters) v.push_back(xi_len.xi[b]);
    return v;
}

std::vector<double> Analysis::h_weight_per_letter() const {
    std::vector<double> w(sub.size(), 0.0);
    for (std::size_t i = 0; i < b_letters.size(); ++i) w[b_letters[i]] = norm.h[i] / xi_len.xi[b_letters[i]];
    return w;
}

Analysis analyze(const Substitution& sub) {
    Analysis a;
    a.sub = sub;
    a.report = admissibility_report(sub);
    if (!a.report.admissible()) {
        std::string msg = "inadmissible substitution";
        for (const auto& f : a.report.failures) msg += "; " + f;
        throw AdmissibilityError(msg);
    }
    a.matrix = substitution_matrix(sub);
    a.blocks = normal_form(a.matrix);
    a.rho_A = a.report.shape.rho_A;
    a.rho_B = a.report.shape.rho_B;
    a.alpha = *a.report.alpha;
    a.lambda = sub.dim == 2 ? static_cast<double>(sub.q) : a.rho_A;
    a.b_letters = a.blocks.b_part;
    a.is_b.assign(sub.size(), false);
    for (auto b : a.b_letters) a.is_b[b] = true;
    a.xi_len = suspension_lengths(sub);
    a.xi_tr = transverse_weights(a.matrix, a.b_letters, a.xi_len);
    PerronData pb = perron_vectors(principal_submatrix(a.matrix, a.b_letters), Normalization::sum_one);
    a.norm = measure_normalization(a.xi_len_b(), a.xi_tr, pb.left_vec);
    a.mass.h = a.norm.h;
    a.graph = build_graph(sub, a.b_letters, a.xi_len.xi, a.lambda, a.rho_B);
    return a;
}

}  // namespace selfsim
