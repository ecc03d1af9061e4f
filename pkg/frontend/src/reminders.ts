/** Due-reminder list view models. */

import type { ReminderDto } from "./types.js";

export interface ReminderView {
  reminderId: string;
  caseId: string;
  windowText: string;
}

export function buildReminderViews(reminders: ReminderDto[]): ReminderView[] {
  return reminders.map((r) => ({
    reminderId: r.reminder_id,
    caseId: r.case_id,
    windowText: `${r.window_start} → ${r.window_end}`,
  }));
}
