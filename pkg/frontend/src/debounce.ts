export interface Debounced<Args extends unknown[]> {
  (...args: Args): void;
  cancel(): void;
}

/**
 * Trailing-edge debounce: the wrapped function runs once, with the most
 * recent arguments, `delayMs` after calls stop arriving.
 */
export function debounce<Args extends unknown[]>(
  fn: (...args: Args) => void,
  delayMs = 150,
): Debounced<Args> {
  let timer: ReturnType<typeof setTimeout> | null = null;
  const wrapped = (...args: Args): void => {
    if (timer !== null) clearTimeout(timer);
    timer = setTimeout(() => {
      timer = null;
      fn(...args);
    }, delayMs);
  };
  wrapped.cancel = () => {
    if (timer !== null) clearTimeout(timer);
    timer = null;
  };
  return wrapped;
}
