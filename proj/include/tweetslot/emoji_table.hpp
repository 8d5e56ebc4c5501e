#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace tweetslot {

// Built-in emoji -> ASCII alias table (the same rows as data/emoji_map.tsv).
inline const std::vector<std::pair<std::u32string, std::string>>& builtin_emoji_table() {
  static const std::vector<std::pair<std::u32string, std::string>> table = {
      {U"\U0001F600", ":grinning_face:"},
      {U"\U0001F601", ":grinning_face_with_smiling_eyes:"},
      {U"\U0001F602", ":face_with_tears_of_joy:"},
      {U"\U0001F603", ":smiling_face_with_open_mouth:"},
      {U"\U0001F604", ":smiling_face_with_open_mouth_and_smiling_eyes:"},
      {U"\U0001F605", ":smiling_face_with_open_mouth_and_cold_sweat:"},
      {U"\U0001F606", ":smiling_face_with_open_mouth_and_tightly_closed_eyes:"},
      {U"\U0001F607", ":smiling_face_with_halo:"},
      {U"\U0001F608", ":smiling_face_with_horns:"},
      {U"\U0001F609", ":winking_face:"},
      {U"\U0001F60A", ":smiling_face_with_smiling_eyes:"},
      {U"\U0001F60B", ":face_savouring_delicious_food:"},
      {U"\U0001F60C", ":relieved_face:"},
      {U"\U0001F60D", ":smiling_face_with_heart_shaped_eyes:"},
      {U"\U0001F60E", ":smiling_face_with_sunglasses:"},
      {U"\U0001F60F", ":smirking_face:"},
      {U"\U0001F610", ":neutral_face:"},
      {U"\U0001F611", ":expressionless_face:"},
      {U"\U0001F612", ":unamused_face:"},
      {U"\U0001F613", ":face_with_cold_sweat:"},
      {U"\U0001F614", ":pensive_face:"},
      {U"\U0001F615", ":confused_face:"},
      {U"\U0001F616", ":confounded_face:"},
      {U"\U0001F617", ":kissing_face:"},
      {U"\U0001F618", ":face_throwing_a_kiss:"},
      {U"\U0001F619", ":kissing_face_with_smiling_eyes:"},
      {U"\U0001F61A", ":kissing_face_with_closed_eyes:"},
      {U"\U0001F61B", ":face_with_stuck_out_tongue:"},
      {U"\U0001F61C", ":face_with_stuck_out_tongue_and_winking_eye:"},
      {U"\U0001F61D", ":face_with_stuck_out_tongue_and_tightly_closed_eyes:"},
      {U"\U0001F61E", ":disappointed_face:"},
      {U"\U0001F61F", ":worried_face:"},
      {U"\U0001F620", ":angry_face:"},
      {U"\U0001F621", ":pouting_face:"},
      {U"\U0001F622", ":crying_face:"},
      {U"\U0001F623", ":persevering_face:"},
      {U"\U0001F624", ":face_with_look_of_triumph:"},
      {U"\U0001F625", ":disappointed_but_relieved_face:"},
      {U"\U0001F626", ":frowning_face_with_open_mouth:"},
      {U"\U0001F627", ":anguished_face:"},
      {U"\U0001F628", ":fearful_face:"},
      {U"\U0001F629", ":weary_face:"},
      {U"\U0001F62A", ":sleepy_face:"},
      {U"\U0001F62B", ":tired_face:"},
      {U"\U0001F62C", ":grimacing_face:"},
      {U"\U0001F62D", ":loudly_crying_face:"},
      {U"\U0001F62E", ":face_with_open_mouth:"},
      {U"\U0001F62F", ":hushed_face:"},
      {U"\U0001F630", ":face_with_open_mouth_and_cold_sweat:"},
      {U"\U0001F631", ":face_screaming_in_fear:"},
      {U"\U0001F632", ":astonished_face:"},
      {U"\U0001F633", ":flushed_face:"},
      {U"\U0001F634", ":sleeping_face:"},
      {U"\U0001F635", ":dizzy_face:"},
      {U"\U0001F636", ":face_without_mouth:"},
      {U"\U0001F637", ":face_with_medical_mask:"},
      {U"\U0001F638", ":grinning_cat_face_with_smiling_eyes:"},
      {U"\U0001F639", ":cat_face_with_tears_of_joy:"},
      {U"\U0001F63A", ":smiling_cat_face_with_open_mouth:"},
      {U"\U0001F63B", ":smiling_cat_face_with_heart_shaped_eyes:"},
      {U"\U0001F63C", ":cat_face_with_wry_smile:"},
      {U"\U0001F63D", ":kissing_cat_face_with_closed_eyes:"},
      {U"\U0001F63E", ":pouting_cat_face:"},
      {U"\U0001F63F", ":crying_cat_face:"},
      {U"\U0001F640", ":weary_cat_face:"},
      {U"\U0001F641", ":slightly_frowning_face:"},
      {U"\U0001F642", ":slightly_smiling_face:"},
      {U"\U0001F643", ":upside_down_face:"},
      {U"\U0001F644", ":face_with_rolling_eyes:"},
      {U"\U0001F645", ":face_with_no_good_gesture:"},
      {U"\U0001F646", ":face_with_ok_gesture:"},
      {U"\U0001F647", ":person_bowing_deeply:"},
      {U"\U0001F648", ":see_no_evil_monkey:"},
      {U"\U0001F649", ":hear_no_evil_monkey:"},
      {U"\U0001F64A", ":speak_no_evil_monkey:"},
      {U"\U0001F64B", ":happy_person_raising_one_hand:"},
      {U"\U0001F64C", ":person_raising_both_hands_in_celebration:"},
      {U"\U0001F64D", ":person_frowning:"},
      {U"\U0001F64E", ":person_with_pouting_face:"},
      {U"\U0001F64F", ":person_with_folded_hands:"},
      {U"\U0001F910", ":zipper_mouth_face:"},
      {U"\U0001F911", ":money_mouth_face:"},
      {U"\U0001F912", ":face_with_thermometer:"},
      {U"\U0001F913", ":nerd_face:"},
      {U"\U0001F914", ":thinking_face:"},
      {U"\U0001F915", ":face_with_head_bandage:"},
      {U"\U0001F916", ":robot_face:"},
      {U"\U0001F917", ":hugging_face:"},
      {U"\U0001F918", ":sign_of_the_horns:"},
      {U"\U0001F919", ":call_me_hand:"},
      {U"\U0001F91A", ":raised_back_of_hand:"},
      {U"\U0001F91B", ":left_facing_fist:"},
      {U"\U0001F91C", ":right_facing_fist:"},
      {U"\U0001F91D", ":handshake:"},
      {U"\U0001F91E", ":hand_with_index_and_middle_fingers_crossed:"},
      {U"\U0001F91F", ":i_love_you_hand_sign:"},
      {U"\U0001F920", ":face_with_cowboy_hat:"},
      {U"\U0001F921", ":clown_face:"},
      {U"\U0001F922", ":nauseated_face:"},
      {U"\U0001F923", ":rolling_on_the_floor_laughing:"},
      {U"\U0001F924", ":drooling_face:"},
      {U"\U0001F925", ":lying_face:"},
      {U"\U0001F926", ":face_palm:"},
      {U"\U0001F927", ":sneezing_face:"},
      {U"\U0001F928", ":face_with_one_eyebrow_raised:"},
      {U"\U0001F929", ":grinning_face_with_star_eyes:"},
      {U"\U0001F92A", ":grinning_face_with_one_large_and_one_small_eye:"},
      {U"\U0001F92B", ":face_with_finger_covering_closed_lips:"},
      {U"\U0001F92C", ":serious_face_with_symbols_covering_mouth:"},
      {U"\U0001F92D", ":smiling_face_with_smiling_eyes_and_hand_covering_mouth:"},
      {U"\U0001F92E", ":face_with_open_mouth_vomiting:"},
      {U"\U0001F92F", ":shocked_face_with_exploding_head:"},
      {U"\U0001F970", ":smiling_face_with_smiling_eyes_and_three_hearts:"},
      {U"\U0001F971", ":yawning_face:"},
      {U"\U0001F972", ":smiling_face_with_tear:"},
      {U"\U0001F973", ":face_with_party_horn_and_party_hat:"},
      {U"\U0001F974", ":face_with_uneven_eyes_and_wavy_mouth:"},
      {U"\U0001F975", ":overheated_face:"},
      {U"\U0001F976", ":freezing_face:"},
      {U"\U0001F977", ":ninja:"},
      {U"\U0001F978", ":disguised_face:"},
      {U"\U0001F97A", ":face_with_pleading_eyes:"},
      {U"\U00002764", ":heavy_black_heart:"},
      {U"\U0001F44D", ":thumbs_up_sign:"},
      {U"\U0001F44E", ":thumbs_down_sign:"},
      {U"\U0001F44F", ":clapping_hands_sign:"},
      {U"\U0001F4AF", ":hundred_points_symbol:"},
      {U"\U0001F525", ":fire:"},
      {U"\U0001F494", ":broken_heart:"},
      {U"\U0001F495", ":two_hearts:"},
      {U"\U0001F496", ":sparkling_heart:"},
      {U"\U0001F497", ":growing_heart:"},
      {U"\U0001F499", ":blue_heart:"},
      {U"\U0001F49A", ":green_heart:"},
      {U"\U0001F49B", ":yellow_heart:"},
      {U"\U0001F49C", ":purple_heart:"},
      {U"\U0001F5A4", ":black_heart:"},
      {U"\U0001F90D", ":white_heart:"},
      {U"\U0001F9E1", ":orange_heart:"},
      {U"\U0001F4AA", ":flexed_biceps:"},
      {U"\U0001F440", ":eyes:"},
      {U"\U0001F480", ":skull:"},
      {U"\U00002620", ":skull_and_crossbones:"},
      {U"\U0001F9A0", ":microbe:"},
      {U"\U0001F489", ":syringe:"},
      {U"\U0001F48A", ":pill:"},
      {U"\U0001F321", ":thermometer:"},
      {U"\U0001F3E5", ":hospital:"},
      {U"\U0001F691", ":ambulance:"},
      {U"\U0001F9FC", ":bar_of_soap:"},
      {U"\U0001F9F4", ":lotion_bottle:"},
      {U"\U0001F9FB", ":roll_of_paper:"},
      {U"\U0001F30E", ":earth_globe_americas:"},
      {U"\U0001F30D", ":earth_globe_europe_africa:"},
      {U"\U0001F30F", ":earth_globe_asia_australia:"},
      {U"\U0001F6A8", ":police_cars_revolving_light:"},
      {U"\U000026A0", ":warning_sign:"},
      {U"\U00002705", ":white_heavy_check_mark:"},
      {U"\U0000274C", ":cross_mark:"},
      {U"\U00002757", ":heavy_exclamation_mark_symbol:"},
      {U"\U00002753", ":black_question_mark_ornament:"},
      {U"\U0001F447", ":white_down_pointing_backhand_index:"},
      {U"\U0001F446", ":white_up_pointing_backhand_index:"},
      {U"\U0001F449", ":white_right_pointing_backhand_index:"},
      {U"\U0001F448", ":white_left_pointing_backhand_index:"},
      {U"\U0001F44C", ":ok_hand_sign:"},
      {U"\U0000270C", ":victory_hand:"},
      {U"\U0001F389", ":party_popper:"},
      {U"\U0001F38A", ":confetti_ball:"},
      {U"\U0001F381", ":wrapped_present:"},
      {U"\U00002728", ":sparkles:"},
      {U"\U0001F31F", ":glowing_star:"},
      {U"\U00002B50", ":white_medium_star:"},
      {U"\U0001F308", ":rainbow:"},
      {U"\U00002600", ":black_sun_with_rays:"},
      {U"\U0001F319", ":crescent_moon:"},
      {U"\U0001F4F0", ":newspaper:"},
      {U"\U0001F4E2", ":public_address_loudspeaker:"},
      {U"\U0001F4E3", ":cheering_megaphone:"},
      {U"\U0001F3E0", ":house_building:"},
      {U"\U0001F3EB", ":school:"},
      {U"\U0001F3E2", ":office_building:"},
      {U"\U0001F6AB", ":no_entry_sign:"},
      {U"\U0001F6D1", ":octagonal_sign:"},
      {U"\U000023F0", ":alarm_clock:"},
      {U"\U0001F4C5", ":calendar:"},
      {U"\U0001F4C8", ":chart_with_upwards_trend:"},
      {U"\U0001F4C9", ":chart_with_downwards_trend:"},
      {U"\U0001F4CA", ":bar_chart:"},
      {U"\U0001F4B0", ":money_bag:"},
      {U"\U0001F4B5", ":banknote_with_dollar_sign:"},
      {U"\U0001F37A", ":beer_mug:"},
      {U"\U0001F377", ":wine_glass:"},
      {U"\U00002615", ":hot_beverage:"},
      {U"\U0001F355", ":slice_of_pizza:"},
      {U"\U0001F354", ":hamburger:"},
      {U"\U0001F436", ":dog_face:"},
      {U"\U0001F431", ":cat_face:"},
      {U"\U0001F3C3", ":runner:"},
      {U"\U0001F6B6", ":pedestrian:"},
      {U"\U0001F9D1", ":adult:"},
      {U"\U0001F468", ":man:"},
      {U"\U0001F469", ":woman:"},
      {U"\U0001F474", ":older_man:"},
      {U"\U0001F475", ":older_woman:"},
      {U"\U0001F476", ":baby:"},
      {U"\U0001F466", ":boy:"},
      {U"\U0001F467", ":girl:"},
      {U"\U0001F46A", ":family:"},
      {U"\U0001F4F1", ":mobile_phone:"},
      {U"\U0001F4BB", ":personal_computer:"},
      {U"\U0001F4F7", ":camera:"},
      {U"\U0001F3B5", ":musical_note:"},
      {U"\U0001F3B6", ":multiple_musical_notes:"},
      {U"\U0001F937", ":shrug:"},
  };
  return table;
}

}  // namespace tweetslot
