#include <pybind11/pybind11.h>
PYBIND11_MODULE(_fgforge, m) { m.doc() = "stub"; }
