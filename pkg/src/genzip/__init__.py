"""genzip: generative image compression at ultra-low bitrates.

Encode side: a structural raster-scan caption (losslessly DEFLATE-coded) and
an 8x-downsampled, low-bitrate-coded visual condition, packed into a bit-exact
container.  Decode side: a pluggable generative backend reconstructs the image
from the transmitted conditions.  Ships with deterministic mocks and a full
rate/quality evaluation harness.
"""

__version__ = "0.1.0"
