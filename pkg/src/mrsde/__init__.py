"""Numerical laboratory for mean-reflected SDEs driven by their law."""

import mrsde.model.coefficients
import mrsde.model.constraints
