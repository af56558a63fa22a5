"""Gauss-Legendre node tables shared by the quadrature implementations.

7- and 15-point rules on [-1, 1]; the 15-point value is the estimate and
|GL15 - GL7| the embedded error indicator.  Values were computed by Newton
iteration on the Legendre polynomials at 40 decimal digits and rounded to
double precision; unit tests confirm exactness up to polynomial degree 13
and 29 respectively.
"""

import numpy as np

GL7_NODES = (
    -0.9491079123427585245262,
    -0.7415311855993944398639,
    -0.4058451513773971669066,
    0.0,
    0.4058451513773971669066,
    0.7415311855993944398639,
    0.9491079123427585245262,
)

GL7_WEIGHTS = (
    0.1294849661688696932706,
    0.2797053914892766679015,
    0.3818300505051189449504,
    0.4179591836734693877551,
    0.3818300505051189449504,
    0.2797053914892766679015,
    0.1294849661688696932706,
)

GL15_NODES = (
    -0.9879925180204854284896,
    -0.9372733924007059043078,
    -0.8482065834104272162006,
    -0.7244177313601700474162,
    -0.5709721726085388475372,
    -0.3941513470775633698972,
    -0.2011940939974345223006,
    0.0,
    0.2011940939974345223006,
    0.3941513470775633698972,
    0.5709721726085388475372,
    0.7244177313601700474162,
    0.8482065834104272162006,
    0.9372733924007059043078,
    0.9879925180204854284896,
)

GL15_WEIGHTS = (
    0.03075324199611726835463,
    0.07036604748810812470927,
    0.1071592204671719350119,
    0.1395706779261543144478,
    0.1662692058169939335532,
    0.1861610000155622110268,
    0.1984314853271115764561,
    0.2025782419255612728806,
    0.1984314853271115764561,
    0.1861610000155622110268,
    0.1662692058169939335532,
    0.1395706779261543144478,
    0.1071592204671719350119,
    0.07036604748810812470927,
    0.03075324199611726835463,
)

X7 = np.asarray(GL7_NODES)
W7 = np.asarray(GL7_WEIGHTS)
X15 = np.asarray(GL15_NODES)
W15 = np.asarray(GL15_WEIGHTS)
for _a in (X7, W7, X15, W15):
    _a.setflags(write=False)
