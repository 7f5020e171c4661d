//! The published results table, embedded so the audit runs without the PDF.
//!
//! Values are transcribed verbatim (decimal commas normalized). They are
//! comparison targets for `--compare-paper`, never asserted as ground truth.

use serde::Serialize;

#[derive(Debug, Clone, Copy, Serialize)]
pub struct PublishedRow {
    pub n: u32,
    pub gamma: f64,
    pub x2: f64,
    pub dx: f64,
    pub p2: f64,
    pub dp: f64,
    pub dxdp: f64,
    pub fx: f64,
    pub fp: f64,
    pub fxfp: f64,
    pub sx: f64,
    pub sp: f64,
    pub s_sum: f64,
}

macro_rules! row {
    ($n:expr, $g:expr, $x2:expr, $dx:expr, $p2:expr, $dp:expr, $dxdp:expr,
     $fx:expr, $fp:expr, $fxfp:expr, $sx:expr, $sp:expr, $ssum:expr) => {
        PublishedRow {
            n: $n,
            gamma: $g,
            x2: $x2,
            dx: $dx,
            p2: $p2,
            dp: $dp,
            dxdp: $dxdp,
            fx: $fx,
            fp: $fp,
            fxfp: $fxfp,
            sx: $sx,
            sp: $sp,
            s_sum: $ssum,
        }
    };
}

pub const PUBLISHED_TABLE: [PublishedRow; 18] = [
    row!(0, 0.00, 0.5000, 0.7071, 0.5000, 0.7071, 0.5000, 2.0000, 2.0000, 4.0000, 1.0724, 1.0724, 2.1448),
    row!(0, -0.16, 0.5918, 0.7693, 0.4080, 0.6380, 0.4908, 1.69165, 2.4516, 4.1472, 1.1561, 0.9707, 2.1268),
    row!(0, -0.32, 0.7136, 0.8447, 0.2737, 0.5232, 0.4419, 1.4026, 3.7700, 5.2878, 1.2501, 0.8054, 2.0555),
    row!(0, -0.48, 0.8912, 0.9440, 0.0188, 0.1371, 0.1295, 1.1276, 6.9355, 7.8205, 1.3608, 0.7162, 2.0770),
    row!(0, -0.64, 1.1842, 1.0882, 0.4410, 0.6641, 0.7227, 0.8607, 8.2659, 7.1145, 1.5014, 0.9599, 2.4613),
    row!(0, -0.80, 1.8090, 1.3450, 0.6658, 0.8160, 1.0975, 0.5927, 12.2000, 7.2311, 1.7082, 1.0184, 2.7266),
    row!(1, 0.00, 1.5000, 1.2247, 1.5000, 1.2247, 1.5000, 6.0000, 6.0000, 36.0000, 1.3427, 1.3427, 2.6854),
    row!(1, -0.16, 1.8392, 1.3562, 1.17526, 1.0842, 1.4704, 4.8935, 7.6593, 37.4804, 1.4434, 1.2167, 2.6601),
    row!(1, -0.32, 2.3685, 1.5390, 0.480699, 0.6933, 1.0670, 3.8012, 13.4774, 51.2303, 1.5644, 1.0148, 2.5792),
    row!(1, -0.48, 3.2837, 1.8121, 1.36547, 1.1685, 2.1175, 2.7485, 6.2457, 17.1663, 1.7147, 1.2308, 2.9455),
    row!(1, -0.64, 5.1536, 2.2702, 1.02251, 1.0112, 2.2956, 1.7716, 13.5291, 23.9682, 1.9122, 0.8693, 2.7815),
    row!(1, -0.80, 10.4112, 3.2266, 0.533192, 0.7302, 2.3561, 0.9166, 22.3000, 20.4402, 2.2096, 0.5957, 2.8053),
    row!(2, 0.00, 2.5000, 1.5811, 2.5000, 1.5811, 2.5000, 10.0000, 10.0000, 100.0000, 1.4986, 1.4986, 2.9972),
    row!(2, -0.16, 3.23687, 1.7991, 1.7994, 1.3414, 2.4133, 7.7103, 13.8006, 106.4068, 1.6128, 1.3503, 2.9631),
    row!(2, -0.32, 4.51644, 2.1252, 0.9625, 0.9811, 2.0850, 5.4827, 17.7237, 97.1737, 1.7513, 1.3525, 3.1038),
    row!(2, -0.48, 7.00704, 2.6471, 1.7410, 1.3195, 3.4928, 3.4664, 9.8800, 34.2480, 1.9195, 1.0208, 2.9403),
    row!(2, -0.64, 12.5885, 3.5480, 1.0710, 1.0349, 3.6718, 1.8689, 19.9000, 37.1911, 2.1301, 0.6893, 2.8194),
    row!(2, -0.80, 29.3421, 5.4168, 0.4937, 0.7026, 3.8085, 0.7776, 48.9000, 38.0261, 2.2452, 0.3027, 2.5479),
];

/// Look up the published row for `(n, gamma)` if it exists.
pub fn published_row(n: u32, gamma: f64) -> Option<&'static PublishedRow> {
    PUBLISHED_TABLE
        .iter()
        .find(|r| r.n == n && (r.gamma - gamma).abs() < 1e-9)
}
