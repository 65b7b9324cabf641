#include "ftc/linalg.hpp"

#include <stdexcept>

namespace ftc {

QVec solve_rational(QMat a, QVec b) {
    const size_t n = b.size();
    for (size_t k = 0; k < n; ++k) {
        size_t piv = k;
        while (piv < n && a[piv][k] == 0) ++piv;
        if (piv == n) throw std::domain_error("singular rational system");
        std::swap(a[k], a[piv]);
        std::swap(b[k], b[piv]);
        for (size_t i = 0; i < n; ++i) {
            if (i == k || a[i][k] == 0) continue;
            Q f = a[i][k] / a[k][k];
            for (size_t j = k; j < n; ++j)
                if (a[k][j] != 0) a[i][j] -= f * a[k][j];
            b[i] -= f * b[k];
        }
    }
    QVec x(n);
    for (size_t i = 0; i < n; ++i) x[i] = b[i] / a[i][i];
    return x;
}

QMat mat_mul(const QMat& a, const QMat& b) {
    if (a.empty()) return {};
    const size_t n = a.size(), m = b.size(), p = b.empty() ? 0 : b[0].size();
    QMat c(n, QVec(p, Q(0)));
    for (size_t i = 0; i < n; ++i)
        for (size_t l = 0; l < m; ++l) {
            if (a[i][l] == 0) continue;
            for (size_t j = 0; j < p; ++j)
                if (b[l][j] != 0) c[i][j] += a[i][l] * b[l][j];
        }
    return c;
}

QVec vec_mat(const QVec& v, const QMat& m) {
    const size_t p = m.empty() ? 0 : m[0].size();
    QVec out(p, Q(0));
    for (size_t l = 0; l < m.size(); ++l) {
        if (v[l] == 0) continue;
        for (size_t j = 0; j < p; ++j)
            if (m[l][j] != 0) out[j] += v[l] * m[l][j];
    }
    return out;
}

QVec mat_vec(const QMat& m, const QVec& v) {
    QVec out(m.size(), Q(0));
    for (size_t i = 0; i < m.size(); ++i) out[i] = dot(m[i], v);
    return out;
}

Q dot(const QVec& a, const QVec& b) {
    Q s = 0;
    for (size_t i = 0; i < a.size(); ++i)
        if (a[i] != 0 && b[i] != 0) s += a[i] * b[i];
    return s;
}

}  // namespace ftc
