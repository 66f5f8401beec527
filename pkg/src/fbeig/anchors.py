"""Reference values frozen from one-off runs.

ELLIPSE_REF comes from ``fbeig oracle --a 0.5 --b 1 --h 0.01 0.005 0.0025``:
Richardson extrapolation of the finite-difference eigenvalue at the two
finest spacings. It is independent of the Bessel fit.
"""

ELLIPSE_AXES = (0.5, 1.0)
ELLIPSE_LADDER = (
    (0.01, 14.265596791611628),
    (0.005, 14.266576170669312),
    (0.0025, 14.266823481751167),
)
ELLIPSE_REF = 14.266905918778452
ELLIPSE_REF_ERROR = 8.243702728509088e-05

# j_{0,1}^2, lowest Dirichlet eigenvalue of the unit disk
DISK_EIGENVALUE = 5.783185962946785
