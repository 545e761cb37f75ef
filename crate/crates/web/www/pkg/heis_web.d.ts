/* tslint:disable */
/* eslint-disable */

/**
 * Extension of the closed unit-square lift over the disc.
 */
export class Extension {
    free(): void;
    [Symbol.dispose](): void;
    /**
     * `[x, y, z, depth]` of the value at a disc point.
     */
    eval(x: number, y: number): Float64Array;
    heatmap(res: number, component: number): Float64Array;
    constructor(n_eff: number, depth: number);
    rootTriangles(): number;
}

/**
 * `points` is a flat `[x0, y0, x1, y1, ...]` loop.
 */
export function filling(points: Float64Array, l: number): string;

export function geodesic(x: number, y: number, z: number, samples: number): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_extension_free: (a: number, b: number) => void;
    readonly extension_eval: (a: number, b: number, c: number) => [number, number, number, number];
    readonly extension_heatmap: (a: number, b: number, c: number) => [number, number, number, number];
    readonly extension_new: (a: number, b: number) => [number, number, number];
    readonly extension_rootTriangles: (a: number) => number;
    readonly filling: (a: number, b: number, c: number) => [number, number, number, number];
    readonly geodesic: (a: number, b: number, c: number, d: number) => [number, number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_start: () => void;
}

export type SyncInitInput = BufferSource | WebAssembly.Module;

/**
 * Instantiates the given `module`, which can either be bytes or
 * a precompiled `WebAssembly.Module`.
 *
 * @param {{ module: SyncInitInput }} module - Passing `SyncInitInput` directly is deprecated.
 *
 * @returns {InitOutput}
 */
export function initSync(module: { module: SyncInitInput } | SyncInitInput): InitOutput;

/**
 * If `module_or_path` is {RequestInfo} or {URL}, makes a request and
 * for everything else, calls `WebAssembly.instantiate` directly.
 *
 * @param {{ module_or_path: InitInput | Promise<InitInput> }} module_or_path - Passing `InitInput` directly is deprecated.
 *
 * @returns {Promise<InitOutput>}
 */
export default function __wbg_init (module_or_path?: { module_or_path: InitInput | Promise<InitInput> } | InitInput | Promise<InitInput>): Promise<InitOutput>;
