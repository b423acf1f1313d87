//! Binary morphology and connectivity helpers used by brain-mask extraction
//! and the pipeline's component filters.

use crate::image::BinaryMask;

/// Offsets of a discrete Euclidean disk: all (dx,dy) with dx²+dy² ≤ r².
fn disk_offsets(radius: usize) -> Vec<(isize, isize)> {
    let r = radius as isize;
    let r2 = r * r;
    let mut offs = Vec::new();
    for dy in -r..=r {
        for dx in -r..=r {
            if dx * dx + dy * dy <= r2 {
                offs.push((dx, dy));
            }
        }
    }
    offs
}

fn transform(mask: &BinaryMask, offsets: &[(isize, isize)], dilate: bool) -> BinaryMask {
    let (w, h) = (mask.width() as isize, mask.height() as isize);
    let mut out = BinaryMask::zeros(mask.width(), mask.height()).unwrap();
    for y in 0..h {
        for x in 0..w {
            let mut hit = !dilate; // erode: assume all-in until a miss
            for &(dx, dy) in offsets {
                let (nx, ny) = (x + dx, y + dy);
                let v = if nx >= 0 && nx < w && ny >= 0 && ny < h {
                    mask.get(nx as usize, ny as usize)
                } else if dilate {
                    0 // dilation: out-of-image is background
                } else {
                    1 // erosion: out-of-image never erodes (closing stays extensive)
                };
                if dilate {
                    if v == 1 {
                        hit = true;
                        break;
                    }
                } else if v == 0 {
                    hit = false;
                    break;
                }
            }
            out.set(x as usize, y as usize, u8::from(hit));
        }
    }
    out
}

pub fn dilate(mask: &BinaryMask, radius: usize) -> BinaryMask {
    if radius == 0 {
        return mask.clone();
    }
    transform(mask, &disk_offsets(radius), true)
}

pub fn erode(mask: &BinaryMask, radius: usize) -> BinaryMask {
    if radius == 0 {
        return mask.clone();
    }
    transform(mask, &disk_offsets(radius), false)
}

/// Morphological closing: dilation followed by erosion with the same disk.
pub fn closing(mask: &BinaryMask, radius: usize) -> BinaryMask {
    erode(&dilate(mask, radius), radius)
}

const NEIGHBORS8: [(isize, isize); 8] =
    [(-1, -1), (0, -1), (1, -1), (-1, 0), (1, 0), (-1, 1), (0, 1), (1, 1)];

/// Label 8-connected foreground components. Returns (labels, count) where
/// labels[j] = 0 for background and 1..=count for components, numbered in
/// raster-scan order of their first pixel.
pub fn connected_components(mask: &BinaryMask) -> (Vec<u32>, usize) {
    let (w, h) = (mask.width(), mask.height());
    let mut labels = vec![0u32; w * h];
    let mut count = 0u32;
    let mut stack = Vec::new();
    for start in 0..w * h {
        if mask.values()[start] == 0 || labels[start] != 0 {
            continue;
        }
        count += 1;
        labels[start] = count;
        stack.push(start);
        while let Some(idx) = stack.pop() {
            let (x, y) = ((idx % w) as isize, (idx / w) as isize);
            for (dx, dy) in NEIGHBORS8 {
                let (nx, ny) = (x + dx, y + dy);
                if nx < 0 || ny < 0 || nx >= w as isize || ny >= h as isize {
                    continue;
                }
                let nidx = ny as usize * w + nx as usize;
                if mask.values()[nidx] == 1 && labels[nidx] == 0 {
                    labels[nidx] = count;
                    stack.push(nidx);
                }
            }
        }
    }
    (labels, count as usize)
}

/// Keep only the largest 8-connected component (first in raster order wins
/// ties). Empty input stays empty.
pub fn largest_component(mask: &BinaryMask) -> BinaryMask {
    let (labels, count) = connected_components(mask);
    if count == 0 {
        return mask.clone();
    }
    let mut sizes = vec![0usize; count + 1];
    for &l in &labels {
        sizes[l as usize] += 1;
    }
    let best = (1..=count).max_by_key(|&l| (sizes[l], std::cmp::Reverse(l))).unwrap() as u32;
    let values = labels.iter().map(|&l| u8::from(l == best)).collect();
    BinaryMask::new(mask.width(), mask.height(), values).unwrap()
}

/// Fill interior holes: flood-fill background from the image border
/// (4-connected background), then mark everything not reached as foreground.
pub fn fill_holes(mask: &BinaryMask) -> BinaryMask {
    let (w, h) = (mask.width(), mask.height());
    let mut outside = vec![false; w * h];
    let mut stack = Vec::new();
    let seed = |idx: usize, stack: &mut Vec<usize>, outside: &mut Vec<bool>| {
        if mask.values()[idx] == 0 && !outside[idx] {
            outside[idx] = true;
            stack.push(idx);
        }
    };
    for x in 0..w {
        seed(x, &mut stack, &mut outside);
        seed((h - 1) * w + x, &mut stack, &mut outside);
    }
    for y in 0..h {
        seed(y * w, &mut stack, &mut outside);
        seed(y * w + w - 1, &mut stack, &mut outside);
    }
    while let Some(idx) = stack.pop() {
        let (x, y) = (idx % w, idx / w);
        let mut visit = |nidx: usize| {
            if mask.values()[nidx] == 0 && !outside[nidx] {
                outside[nidx] = true;
                stack.push(nidx);
            }
        };
        if x > 0 {
            visit(idx - 1);
        }
        if x + 1 < w {
            visit(idx + 1);
        }
        if y > 0 {
            visit(idx - w);
        }
        if y + 1 < h {
            visit(idx + w);
        }
    }
    let values = outside.iter().map(|&o| u8::from(!o)).collect();
    BinaryMask::new(w, h, values).unwrap()
}

/// Boundary pixels: foreground pixels with at least one 4-connected
/// background (or out-of-image) neighbor.
pub fn boundary(mask: &BinaryMask) -> BinaryMask {
    let (w, h) = (mask.width() as isize, mask.height() as isize);
    let mut out = BinaryMask::zeros(mask.width(), mask.height()).unwrap();
    for y in 0..h {
        for x in 0..w {
            if mask.get(x as usize, y as usize) == 0 {
                continue;
            }
            let is_boundary = [(-1, 0), (1, 0), (0, -1), (0, 1)].iter().any(|&(dx, dy)| {
                let (nx, ny) = (x + dx, y + dy);
                nx < 0 || ny < 0 || nx >= w || ny >= h || mask.get(nx as usize, ny as usize) == 0
            });
            if is_boundary {
                out.set(x as usize, y as usize, 1);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn from_rows(rows: &[&str]) -> BinaryMask {
        let h = rows.len();
        let w = rows[0].len();
        let values = rows
            .iter()
            .flat_map(|r| r.chars().map(|c| u8::from(c == '1')))
            .collect();
        BinaryMask::new(w, h, values).unwrap()
    }

    #[test]
    fn dilate_erode_single_pixel() {
        let m = from_rows(&["00000", "00000", "00100", "00000", "00000"]);
        let d = dilate(&m, 1);
        assert_eq!(d.count_ones(), 5); // radius-1 disk = plus shape
        assert_eq!(erode(&d, 1), m);
    }

    #[test]
    fn closing_bridges_small_gap() {
        let m = from_rows(&["1101111"]);
        let c = closing(&m, 1);
        assert_eq!(c.values(), from_rows(&["1111111"]).values());
    }

    #[test]
    fn components_and_largest() {
        let m = from_rows(&["1100010", "1100000", "0000011"]);
        let (_, n) = connected_components(&m);
        assert_eq!(n, 3);
        let big = largest_component(&m);
        assert_eq!(big.count_ones(), 4);
        assert_eq!(big.get(0, 0), 1);
        assert_eq!(big.get(5, 0), 0);
    }

    #[test]
    fn diagonal_counts_as_connected() {
        let m = from_rows(&["10", "01"]);
        let (_, n) = connected_components(&m);
        assert_eq!(n, 1);
    }

    #[test]
    fn hole_fill() {
        let m = from_rows(&["11111", "10001", "10101", "10001", "11111"]);
        let f = fill_holes(&m);
        assert_eq!(f.count_ones(), 25);
        // a background region touching the border is not a hole
        let open = from_rows(&["11111", "10001", "10100", "10001", "11111"]);
        let f2 = fill_holes(&open);
        assert_eq!(f2.get(3, 2), 0);
    }

    #[test]
    fn boundary_of_block() {
        let m = from_rows(&["00000", "01110", "01110", "01110", "00000"]);
        let b = boundary(&m);
        assert_eq!(b.count_ones(), 8);
        assert_eq!(b.get(2, 2), 0);
    }
}
