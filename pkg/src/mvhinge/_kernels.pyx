# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled kernel backend: single-pass loops over uint8 label grids."""

import numpy as np

cimport numpy as cnp

cnp.import_array()

BACKEND = "cython"


def contact_mask(const unsigned char[:, ::1] labels, int lv, int la):
    """Mask of `lv` pixels with at least one `la` 4-neighbor."""
    cdef Py_ssize_t h = labels.shape[0]
    cdef Py_ssize_t w = labels.shape[1]
    out_arr = np.zeros((h, w), dtype=np.uint8)
    cdef unsigned char[:, ::1] out = out_arr
    cdef Py_ssize_t y, x
    for y in range(h):
        for x in range(w):
            if labels[y, x] != lv:
                continue
            if ((y > 0 and labels[y - 1, x] == la)
                    or (y + 1 < h and labels[y + 1, x] == la)
                    or (x > 0 and labels[y, x - 1] == la)
                    or (x + 1 < w and labels[y, x + 1] == la)):
                out[y, x] = 1
    return out_arr


def dice_counts(const unsigned char[:, ::1] a, const unsigned char[:, ::1] b, int label):
    """Pixel counts (|A|, |B|, |A n B|) for the given label."""
    cdef Py_ssize_t h = a.shape[0]
    cdef Py_ssize_t w = a.shape[1]
    cdef long long na = 0, nb = 0, ninter = 0
    cdef Py_ssize_t y, x
    cdef bint ia, ib
    for y in range(h):
        for x in range(w):
            ia = a[y, x] == label
            ib = b[y, x] == label
            if ia:
                na += 1
            if ib:
                nb += 1
            if ia and ib:
                ninter += 1
    return int(na), int(nb), int(ninter)


def label_components(const unsigned char[:, ::1] labels, int target, int connectivity):
    """Component ids (int32, 0 = not target, 1..k) and the component count.

    Flood fill with an explicit stack; ids follow raster-scan discovery
    order, so a component's id also orders its minimum (y, x) pixel.
    """
    cdef Py_ssize_t h = labels.shape[0]
    cdef Py_ssize_t w = labels.shape[1]
    out_arr = np.zeros((h, w), dtype=np.int32)
    cdef int[:, ::1] out = out_arr
    stack_arr = np.empty(h * w, dtype=np.intp)
    cdef Py_ssize_t[::1] stack = stack_arr
    cdef Py_ssize_t top, idx, y, x, cy, cx
    cdef int current = 0
    cdef bint diag = connectivity == 8
    for y in range(h):
        for x in range(w):
            if labels[y, x] != target or out[y, x] != 0:
                continue
            current += 1
            out[y, x] = current
            top = 0
            stack[top] = y * w + x
            top += 1
            while top > 0:
                top -= 1
                idx = stack[top]
                cy = idx // w
                cx = idx - cy * w
                if cy > 0 and labels[cy - 1, cx] == target and out[cy - 1, cx] == 0:
                    out[cy - 1, cx] = current
                    stack[top] = idx - w
                    top += 1
                if cy + 1 < h and labels[cy + 1, cx] == target and out[cy + 1, cx] == 0:
                    out[cy + 1, cx] = current
                    stack[top] = idx + w
                    top += 1
                if cx > 0 and labels[cy, cx - 1] == target and out[cy, cx - 1] == 0:
                    out[cy, cx - 1] = current
                    stack[top] = idx - 1
                    top += 1
                if cx + 1 < w and labels[cy, cx + 1] == target and out[cy, cx + 1] == 0:
                    out[cy, cx + 1] = current
                    stack[top] = idx + 1
                    top += 1
                if diag:
                    if cy > 0 and cx > 0 and labels[cy - 1, cx - 1] == target and out[cy - 1, cx - 1] == 0:
                        out[cy - 1, cx - 1] = current
                        stack[top] = idx - w - 1
                        top += 1
                    if cy > 0 and cx + 1 < w and labels[cy - 1, cx + 1] == target and out[cy - 1, cx + 1] == 0:
                        out[cy - 1, cx + 1] = current
                        stack[top] = idx - w + 1
                        top += 1
                    if cy + 1 < h and cx > 0 and labels[cy + 1, cx - 1] == target and out[cy + 1, cx - 1] == 0:
                        out[cy + 1, cx - 1] = current
                        stack[top] = idx + w - 1
                        top += 1
                    if cy + 1 < h and cx + 1 < w and labels[cy + 1, cx + 1] == target and out[cy + 1, cx + 1] == 0:
                        out[cy + 1, cx + 1] = current
                        stack[top] = idx + w + 1
                        top += 1
    return out_arr, current
