// A short tour: range-add/range-min in 1D, box updates in 2D with the
// polylog tree and the general grid, and a min-plus product computed with
// nothing but updates and queries. Every answer is checked against the
// brute-force oracle; the exit code is nonzero if any disagrees.
#include <iostream>
#include <vector>

#include "rangeq/rangeq.hpp"

using namespace rangeq;

namespace {

int failures = 0;

template <class T>
void show(const char* what, const T& got, const T& want) {
  const bool ok = got == want;
  failures += ok ? 0 : 1;
  std::cout << "  " << what << " = " << got << (ok ? "" : "  (oracle disagrees)") << "\n";
}

void print(const SquareMatrix<Scalar>& m) {
  for (std::size_t i = 0; i < m.size(); ++i) {
    std::cout << "    ";
    for (std::size_t j = 0; j < m.size(); ++j) std::cout << (j ? " " : "") << m.at(i, j);
    std::cout << "\n";
  }
}

}  // namespace

int main() {
  std::cout << "1D: add to a range, ask for the minimum\n";
  std::vector<Scalar> temps{18, 21, 17, 25, 30, 22, 19, 24};
  SegTree1D<pairs::PlusMin> line(temps);
  DenseTensor<pairs::PlusMin> line_oracle(Tensor<Scalar>({temps.size()}, temps));
  line.update(Interval(2, 5), 4);
  line_oracle.update(RangeBox{Interval(2, 5)}, 4);
  show("min [0,7]", line.query(Interval(0, 7)), line_oracle.query(RangeBox{Interval(0, 7)}));
  show("min [2,4]", line.query(Interval(2, 4)), line_oracle.query(RangeBox{Interval(2, 4)}));
  std::cout << "  last query visited " << line.counters().last_op() << " of " << line.node_count()
            << " nodes\n";

  std::cout << "2D: box sums with the polylog tree (+,+ is special)\n";
  Tensor<Scalar> grid({6, 5}, std::vector<Scalar>(30, 1));
  NDTree<pairs::PlusPlus, 2> sums(grid.view());
  DenseTensor<pairs::PlusPlus> sums_oracle(grid);
  const RangeBox block{Interval(1, 3), Interval(0, 2)};
  sums.update(block, 10);
  sums_oracle.update(block, 10);
  const RangeBox probe{Interval(2, 5), Interval(1, 4)};
  show("sum rows 2-5, cols 1-4", sums.query(probe), sums_oracle.query(probe));

  std::cout << "2D: box minima after additions need the general grid\n";
  Grid2D<pairs::PlusMin> mins(grid.view());
  DenseTensor<pairs::PlusMin> mins_oracle(grid);
  mins.update(RangeBox{Interval(0, 5), Interval(0, 4)}, 7);
  mins.update(RangeBox{Interval(4, 5), Interval(3, 4)}, -20);
  mins_oracle.update(RangeBox{Interval(0, 5), Interval(0, 4)}, 7);
  mins_oracle.update(RangeBox{Interval(4, 5), Interval(3, 4)}, -20);
  show("min rows 0-3", mins.query(RangeBox{Interval(0, 3), Interval(0, 4)}),
       mins_oracle.query(RangeBox{Interval(0, 3), Interval(0, 4)}));
  show("min everywhere", mins.query(RangeBox{Interval(0, 5), Interval(0, 4)}),
       mins_oracle.query(RangeBox{Interval(0, 5), Interval(0, 4)}));

  std::cout << "Min-plus product via 2N^2 updates and N^2 queries\n";
  SquareMatrix<Scalar> dist(3, {0, 4, 9, 4, 0, 2, 9, 2, 0});
  auto init = encode_matrix<pairs::PlusMin>(dist);
  Grid2D<pairs::PlusMin> backend(init.view());
  auto two_hops = product_via_uq<pairs::PlusMin>(dist, dist, backend);
  print(two_hops);
  failures += two_hops == schoolbook<pairs::PlusMin>(dist, dist) ? 0 : 1;

  std::cout << (failures ? "some answers disagree with the oracle\n" : "all answers match the oracle\n");
  return failures ? 1 : 0;
}
