import type { Api, JobJson } from "./api.js";

/**
 * Poll a job until it reaches a terminal state, reporting every status
 * seen along the way. Resolves with the final job (done or failed).
 */
export async function pollJob(
  client: Api,
  jobId: string,
  onStatus?: (job: JobJson) => void,
  intervalMs = 300,
): Promise<JobJson> {
  for (;;) {
    const job = await client.jobStatus(jobId);
    onStatus?.(job);
    if (job.status === "done" || job.status === "failed") {
      return job;
    }
    await new Promise((resolve) => setTimeout(resolve, intervalMs));
  }
}
