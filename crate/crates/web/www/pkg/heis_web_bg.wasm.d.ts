/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_extension_free: (a: number, b: number) => void;
export const extension_eval: (a: number, b: number, c: number) => [number, number, number, number];
export const extension_heatmap: (a: number, b: number, c: number) => [number, number, number, number];
export const extension_new: (a: number, b: number) => [number, number, number];
export const extension_rootTriangles: (a: number) => number;
export const filling: (a: number, b: number, c: number) => [number, number, number, number];
export const geodesic: (a: number, b: number, c: number, d: number) => [number, number, number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __wbindgen_start: () => void;
