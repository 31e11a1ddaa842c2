#include <cmath>
#include <limits>
#include <vector>

#include "fracq/errors.hpp"
#include "fracq/generator.hpp"

namespace fracq::generator::detail {

// Implicit-shift QL iteration for a symmetric tridiagonal matrix, following
// the classic Algol tql2 procedure (Bowdler, Martin, Reinsch, Wilkinson) and
// its EISPACK descendant. d holds the diagonal, e[i] the off-diagonal
// coupling i and i+1 (e[n-1] is scratch). z starts as the identity and
// accumulates the rotations; z[j][k] ends up as component j of the
// eigenvector for d[k]. Eigenvalues are returned ascending.
void tridiag_ql(std::vector<double>& d, std::vector<double>& e,
                std::vector<std::vector<double>>& z) {
    const std::size_t n = d.size();
    if (e.size() != n) throw parameter_error("tridiag_ql: off-diagonal length mismatch");

    z.assign(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) z[i][i] = 1.0;
    if (n == 1) {
        e[0] = 0.0;
        return;
    }

    e[n - 1] = 0.0;
    const double eps = std::numeric_limits<double>::epsilon();
    double f = 0.0;
    double tst1 = 0.0;

    for (std::size_t l = 0; l < n; ++l) {
        tst1 = std::max(tst1, std::fabs(d[l]) + std::fabs(e[l]));
        std::size_t m = l;
        while (m < n && std::fabs(e[m]) > eps * tst1) ++m;

        if (m > l) {
            int iter = 0;
            do {
                if (++iter > 64)
                    throw numeric_error("tridiag_ql: QL iteration failed to converge (n=" +
                                        std::to_string(n) + ", l=" + std::to_string(l) + ")");

                double g = d[l];
                double p = (d[l + 1] - g) / (2.0 * e[l]);
                double r = std::hypot(p, 1.0);
                if (p < 0.0) r = -r;
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                const double dl1 = d[l + 1];
                double h = g - d[l];
                for (std::size_t i = l + 2; i < n; ++i) d[i] -= h;
                f += h;

                p = d[m];
                double c = 1.0, c2 = c, c3 = c;
                const double el1 = e[l + 1];
                double s = 0.0, s2 = 0.0;
                for (std::size_t ii = m; ii-- > l;) {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[ii];
                    h = c * p;
                    r = std::hypot(p, e[ii]);
                    e[ii + 1] = s * r;
                    s = e[ii] / r;
                    c = p / r;
                    p = c * d[ii] - s * g;
                    d[ii + 1] = h + s * (c * g + s * d[ii]);
                    for (std::size_t k = 0; k < n; ++k) {
                        const double zk = z[k][ii + 1];
                        z[k][ii + 1] = s * z[k][ii] + c * zk;
                        z[k][ii] = c * z[k][ii] - s * zk;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
            } while (std::fabs(e[l]) > eps * tst1);
        }
        d[l] += f;
        e[l] = 0.0;
    }

    // Sort eigenvalues ascending, carrying eigenvector columns along.
    for (std::size_t i = 0; i + 1 < n; ++i) {
        std::size_t k = i;
        for (std::size_t j = i + 1; j < n; ++j)
            if (d[j] < d[k]) k = j;
        if (k != i) {
            std::swap(d[i], d[k]);
            for (std::size_t r = 0; r < n; ++r) std::swap(z[r][i], z[r][k]);
        }
    }
}

} // namespace fracq::generator::detail
