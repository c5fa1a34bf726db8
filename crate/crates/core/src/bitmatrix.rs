//! Gaussian elimination over GF(2) on square matrices of at most 32 columns,
//! given as the images of the standard basis vectors.

/// Basis of `{v : M v = 0}` where `images[i] = M e_i`.
///
/// Returned vectors are bitmasks over the input coordinates.
pub fn kernel(images: &[u32]) -> Vec<u32> {
    assert!(images.len() <= 32, "at most 32 columns supported");
    // each row pairs an image with the input combination that produced it
    let mut rows: Vec<(u32, u32)> = images
        .iter()
        .enumerate()
        .map(|(i, &img)| (img, 1u32 << i))
        .collect();
    let mut basis = Vec::new();
    let mut pivot_rows: Vec<(u32, u32)> = Vec::new();
    for row in rows.iter_mut() {
        for &(p_img, p_comb) in &pivot_rows {
            let top = 31 - p_img.leading_zeros();
            if row.0 >> top & 1 == 1 {
                row.0 ^= p_img;
                row.1 ^= p_comb;
            }
        }
        if row.0 == 0 {
            basis.push(row.1);
        } else {
            pivot_rows.push(*row);
        }
    }
    basis
}

/// Rank of the linear map with the given basis images.
pub fn rank(images: &[u32]) -> u32 {
    images.len() as u32 - kernel(images).len() as u32
}
