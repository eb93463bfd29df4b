//! Binary min-heap over a `Vec`, ordered by a comparator passed to each call.

use std::cmp::Ordering;

pub(crate) fn push<T, F>(heap: &mut Vec<T>, item: T, cmp: &mut F)
where
    F: FnMut(&T, &T) -> Ordering,
{
    heap.push(item);
    let mut i = heap.len() - 1;
    while i > 0 {
        let parent = (i - 1) / 2;
        if cmp(&heap[i], &heap[parent]) == Ordering::Less {
            heap.swap(i, parent);
            i = parent;
        } else {
            break;
        }
    }
}

pub(crate) fn pop<T, F>(heap: &mut Vec<T>, cmp: &mut F) -> Option<T>
where
    F: FnMut(&T, &T) -> Ordering,
{
    if heap.is_empty() {
        return None;
    }
    let last = heap.len() - 1;
    heap.swap(0, last);
    let top = heap.pop();
    let n = heap.len();
    let mut i = 0;
    loop {
        let (l, r) = (2 * i + 1, 2 * i + 2);
        let mut m = i;
        if l < n && cmp(&heap[l], &heap[m]) == Ordering::Less {
            m = l;
        }
        if r < n && cmp(&heap[r], &heap[m]) == Ordering::Less {
            m = r;
        }
        if m == i {
            break;
        }
        heap.swap(i, m);
        i = m;
    }
    top
}
